#pragma once

#include <string>
#include <string_view>

namespace cesaro {

enum class Model { wave, klein_gordon, schrodinger };

/// Which scalar output q_z is observed: the field itself or its time derivative.
enum class OutputKind { field, time_derivative };

std::string_view to_string(Model model) noexcept;
std::string_view to_string(OutputKind kind) noexcept;
/// Throws std::invalid_argument on an unknown name.
Model parse_model(std::string_view name);
OutputKind parse_output_kind(std::string_view name);

/// Output used by the calibration estimates: kinetic for wave/KG, field for Schrodinger.
inline OutputKind natural_output(Model model) noexcept {
  return model == Model::schrodinger ? OutputKind::field : OutputKind::time_derivative;
}

}  // namespace cesaro
