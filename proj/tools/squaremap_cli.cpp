// squaremap: run one experiment file and write its report, tables and plot data.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "squaremap/core.hpp"
#include "squaremap/experiment.hpp"
#include "squaremap/parallel.hpp"

namespace ex = squaremap::experiment;

namespace {

void summarize(const ex::RunReport& rep, std::ostream& os) {
  const auto& p = rep.document["payload"];
  switch (rep.command) {
    case ex::Command::functional:
      os << "S = " << ex::format_number(p["S"].get<double>()) << "  a1 = ["
         << ex::format_number(p["a1"][0].get<double>()) << ", "
         << ex::format_number(p["a1"][1].get<double>()) << "]  injective = "
         << p["injectivity"]["injective"].get<bool>() << '\n';
      break;
    case ex::Command::verify_extremal:
    case ex::Command::slit_positivity:
      os << p["samples"].get<std::size_t>() << " samples, " << p["rejected"].get<std::size_t>()
         << " rejected, " << p["violations"].get<std::size_t>() << " violations, min "
         << ex::format_number(p["min"].get<double>()) << '\n';
      break;
    case ex::Command::uniformize:
    case ex::Command::slit_uniformize: {
      const char* key = rep.command == ex::Command::uniformize ? "S_min" : "L_min";
      os << key << " = " << ex::format_number(p[key].get<double>()) << "  "
         << p["status"].get<std::string>() << '\n';
      break;
    }
    case ex::Command::modulus_check:
      for (const auto& row : p["probes"])
        os << "r = " << ex::format_number(row["r"].get<double>()) << "  residual "
           << ex::format_number(row["consistency_residual"].get<double>()) << "  slack "
           << ex::format_number(row["slack"].get<double>()) << '\n';
      break;
    case ex::Command::area_asymptotics:
      for (const auto& row : p["rows"])
        os << "r = " << ex::format_number(row["r"].get<double>()) << "  A - 4lr = "
           << ex::format_number(row["A_minus_4lr"].get<double>()) << '\n';
      break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Square-domain extremal functional laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string spec_path;
  std::string out_dir = "squaremap-out";
  std::optional<std::uint64_t> seed;
  std::optional<double> mesh;
  bool maximize = false;
  app.add_option("--spec", spec_path, "experiment file (JSON)")->required();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the random seed");
  app.add_option("--mesh", mesh, "override the boundary mesh");
  app.add_flag("--maximize", maximize, "exploratory: maximize S (uniformize only)");

  const char* names[] = {"functional",     "verify-extremal", "slit-positivity",
                         "uniformize",     "slit-uniformize", "modulus-check",
                         "area-asymptotics"};
  for (const char* n : names) app.add_subcommand(n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(squaremap::ErrorCategory::spec);
  }

  try {
    squaremap::configure_threads_from_env();
    const auto command = ex::parse_command(app.get_subcommands().front()->get_name());
    auto spec = ex::parse_spec(spec_path, command);
    ex::apply(spec, {seed, mesh, maximize});
    const auto report = ex::run(spec);
    ex::write_report(report, out_dir);
    if (!report.plot_data.empty()) ex::emit_plot_data(report, out_dir);
    summarize(report, std::cout);
    std::cout << "wrote " << out_dir << "/report.json\n";
    if (report.property_violated) {
      std::cerr << "property violated\n";
      return static_cast<int>(squaremap::ErrorCategory::property);
    }
    const auto& p = report.document["payload"];
    if (p.contains("converged") && !p["converged"].get<bool>())
      return static_cast<int>(squaremap::ErrorCategory::numeric);
    return 0;
  } catch (const squaremap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(squaremap::ErrorCategory::numeric);
  }
}
