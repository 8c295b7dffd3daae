#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cesaro/design.hpp"
#include "cesaro/experiment.hpp"
#include "cesaro/schedule.hpp"

namespace cesaro {

using Json = nlohmann::json;

inline constexpr const char* kSeriesHeader = "# cesaro series v1";
inline constexpr const char* kScheduleHeader = "# cesaro schedule v1";
inline constexpr const char* kPathHeader = "# cesaro path v1";

/// Shortest decimal string that parses back to the same double.
std::string format_real(double x);
/// Strict parse of a full string as a double; throws std::invalid_argument.
double parse_real(const std::string& text);

Json to_json(const ConvexDesign& design);
ConvexDesign design_from_json(const Json& j);

Json to_json(const CalibrationConstants& constants);
Json to_json(const DesignReport& report);
Json to_json(const TailReport& report);
Json to_json(const ContinuousReport& report);
Json series_summary(const CesaroSeries& series);

/// Columns m, K_m, eps_m, Q_m, A_N, E_leK.
std::string series_csv(const CesaroSeries& series);
struct SeriesRow {
  int m = 0;
  int K = 0;
  double eps = 0.0;
  double Q = 0.0;
  double A = 0.0;
  double E_leK = 0.0;
};
std::vector<SeriesRow> parse_series_csv(const std::string& text);

/// Columns t_start, t_end, atom, shift_0[, shift_1]; at most `max_rows` rows,
/// taken from the start of the interval.
std::string schedule_csv(const SwitchingSchedule& schedule, std::int64_t max_rows);
/// One macro interval of a continuous path: t_start, t_end, atom, transit, shift_*, velocity_*.
std::string path_csv(const ContinuousPath& path);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace cesaro
