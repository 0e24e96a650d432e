#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "squaremap/geometry.hpp"
#include "squaremap/laurent.hpp"
#include "squaremap/uniformize.hpp"

namespace squaremap::experiment {

using Json = nlohmann::ordered_json;

enum class Command {
  functional,
  verify_extremal,
  slit_positivity,
  uniformize,
  slit_uniformize,
  modulus_check,
  area_asymptotics,
};

std::string command_name(Command c);
/// Throws SpecError listing the valid names.
Command parse_command(const std::string& name);

/// A fully validated experiment; every optional field has its default filled.
struct ExperimentSpec {
  Command command = Command::functional;
  /// Raw component and map records, kept for the echo.
  Json domain_records = Json::array();
  Json map_records = Json::array();
  geometry::Domain domain;
  /// Name of the map the command acts on (empty: identity).
  std::string map_name;

  double mesh = 1e-3;
  std::vector<double> r_schedule;
  std::vector<double> alphas;
  double alpha = 0.0;
  double exponent = 2.0 / 3.0;
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  double amplitude = 0.1;
  double tolerance = 1e-4;
  uniformize::OptimizerConfig optimizer;

  /// The map named `map_name`, or the identity.
  laurent::NormalizedMap map() const;
  laurent::NormalizedMap map(const std::string& name) const;

  /// Echo in the input grammar; parse_json(to_json()) reproduces the spec.
  Json to_json() const;
};

/// Parses and validates. Errors are SpecError/GeometryError messages that
/// start with the JSON pointer of the offending field.
ExperimentSpec parse_json(const Json& doc);
/// With `command` set, a spec without a "command" field takes it, and a
/// spec naming a different command is rejected.
ExperimentSpec parse_spec(const std::filesystem::path& path,
                          std::optional<Command> command = std::nullopt);

/// Command-line overrides applied after parsing.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> mesh;
  bool maximize = false;
};
void apply(ExperimentSpec& spec, const Overrides& o);

struct RunReport {
  Command command = Command::functional;
  /// echo, payload, meta.
  Json document;
  /// File name -> CSV text. Deterministic for a fixed spec.
  std::map<std::string, std::string> tables;
  /// File name -> whitespace-separated columns for plotting.
  std::map<std::string, std::string> plot_data;
  /// Property suites with violations set this.
  bool property_violated = false;
};

RunReport run(const ExperimentSpec& spec);

/// report.json and the CSV tables.
std::vector<std::filesystem::path> write_report(const RunReport& report,
                                                const std::filesystem::path& dir);

/// The .dat files; throws SpecError for payloads without sequence data.
std::vector<std::filesystem::path> emit_plot_data(const RunReport& report,
                                                  const std::filesystem::path& dir);

/// %.17g, with "nan"/"inf" spelled out.
std::string format_number(double v);

}  // namespace squaremap::experiment
