#include "cesaro/model.hpp"

#include <stdexcept>

namespace cesaro {

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::wave: return "wave";
    case Model::klein_gordon: return "klein_gordon";
    case Model::schrodinger: return "schrodinger";
  }
  return "unknown";
}

std::string_view to_string(OutputKind kind) noexcept {
  return kind == OutputKind::field ? "field" : "time_derivative";
}

Model parse_model(std::string_view name) {
  if (name == "wave") return Model::wave;
  if (name == "klein_gordon") return Model::klein_gordon;
  if (name == "schrodinger") return Model::schrodinger;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

OutputKind parse_output_kind(std::string_view name) {
  if (name == "field") return OutputKind::field;
  if (name == "time_derivative") return OutputKind::time_derivative;
  throw std::invalid_argument("unknown output kind '" + std::string(name) + "'");
}

}  // namespace cesaro
