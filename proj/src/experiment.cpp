#include "squaremap/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "squaremap/core.hpp"
#include "squaremap/functional.hpp"
#include "squaremap/modulus.hpp"
#include "squaremap/parallel.hpp"

namespace squaremap::experiment {

namespace {

constexpr const char* kVersion = "0.3.0";

struct CommandName {
  Command cmd;
  const char* name;
};
constexpr CommandName kCommands[] = {
    {Command::functional, "functional"},
    {Command::verify_extremal, "verify-extremal"},
    {Command::slit_positivity, "slit-positivity"},
    {Command::uniformize, "uniformize"},
    {Command::slit_uniformize, "slit-uniformize"},
    {Command::modulus_check, "modulus-check"},
    {Command::area_asymptotics, "area-asymptotics"},
};

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw SpecError((ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

std::string kind_of(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

// Typed access with pointer-qualified messages.
class Reader {
 public:
  Reader(const Json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail(ptr_, "expected an object, found " + kind_of(j_));
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return ptr_ + "/" + key; }
  const Json& raw(const char* key) const {
    if (!has(key)) fail(at(key), "required field is missing");
    return j_.at(key);
  }

  double number(const char* key) const { return as_number(raw(key), at(key)); }
  double number(const char* key, double def) const { return has(key) ? number(key) : def; }
  double positive(const char* key, double def) const {
    const double v = number(key, def);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }
  std::size_t count(const char* key, std::size_t def) const {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail(at(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }
  bool flag(const char* key, bool def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) fail(at(key), "expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string text(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_string()) fail(at(key), "expected a string, found " + kind_of(v));
    return v.get<std::string>();
  }
  Complex complex(const char* key) const { return as_complex(raw(key), at(key)); }

  void only(std::initializer_list<const char*> allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(ptr_ + "/" + it.key(), "unknown field");
    }
  }

  static double as_number(const Json& v, const std::string& ptr) {
    if (!v.is_number()) fail(ptr, "expected a number, found " + kind_of(v));
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "must be finite");
    return d;
  }
  static Complex as_complex(const Json& v, const std::string& ptr) {
    if (!v.is_array() || v.size() != 2)
      fail(ptr, "expected a complex number written as [re, im]");
    return {as_number(v[0], ptr + "/0"), as_number(v[1], ptr + "/1")};
  }

 private:
  const Json& j_;
  std::string ptr_;
};

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// -- domain -----------------------------------------------------------------

geometry::Component parse_component(const Json& rec, const std::string& ptr) {
  const Reader r(rec, ptr);
  const std::string shape = r.text("shape");
  using namespace geometry;
  if (shape == "point") {
    r.only({"shape", "location"});
    return Point{r.complex("location")};
  }
  if (shape == "disk") {
    r.only({"shape", "center", "radius"});
    return Disk{r.complex("center"), r.number("radius")};
  }
  if (shape == "square") {
    r.only({"shape", "center", "side"});
    return AxisSquare{r.complex("center"), r.number("side")};
  }
  if (shape == "rectangle") {
    r.only({"shape", "center", "width", "height"});
    return AxisRectangle{r.complex("center"), r.number("width"), r.number("height")};
  }
  if (shape == "vertical_slit") {
    r.only({"shape", "center", "length"});
    return VerticalSlit{r.complex("center"), r.number("length")};
  }
  if (shape == "horizontal_slit") {
    r.only({"shape", "center", "length"});
    return HorizontalSlit{r.complex("center"), r.number("length")};
  }
  if (shape == "polygon") {
    r.only({"shape", "vertices"});
    const Json& vs = r.raw("vertices");
    if (!vs.is_array()) fail(r.at("vertices"), "expected an array of [re, im] pairs");
    Polygon p;
    for (std::size_t i = 0; i < vs.size(); ++i)
      p.vertices.push_back(Reader::as_complex(vs[i], r.at("vertices") + "/" + std::to_string(i)));
    return p;
  }
  fail(r.at("shape"), "unknown shape '" + shape +
                          "' (point, disk, square, rectangle, vertical_slit, "
                          "horizontal_slit, polygon)");
}

geometry::Domain parse_domain(const Json& arr) {
  if (!arr.is_array()) fail("/domain", "expected an array of component records");
  std::vector<geometry::Component> comps;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ptr = "/domain/" + std::to_string(i);
    comps.push_back(parse_component(arr[i], ptr));
    try {
      geometry::validate(comps.back());
    } catch (const Error& e) {
      fail(ptr, e.what());
    }
  }
  try {
    return geometry::Domain(std::move(comps));
  } catch (const Error& e) {
    fail("/domain", e.what());
  }
}

// -- maps -------------------------------------------------------------------

laurent::PoleFrame parse_frame(const std::string& s, const std::string& ptr) {
  if (s == "plain") return laurent::PoleFrame::plain;
  if (s == "vertical_slit") return laurent::PoleFrame::vertical_slit;
  if (s == "horizontal_slit") return laurent::PoleFrame::horizontal_slit;
  fail(ptr, "unknown pole frame '" + s + "' (plain, vertical_slit, horizontal_slit)");
}

const char* frame_name(laurent::PoleFrame f) {
  switch (f) {
    case laurent::PoleFrame::vertical_slit: return "vertical_slit";
    case laurent::PoleFrame::horizontal_slit: return "horizontal_slit";
    default: return "plain";
  }
}

class MapResolver {
 public:
  explicit MapResolver(const Json& records) : records_(records) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const std::string ptr = "/maps/" + std::to_string(i);
      const Reader r(records[i], ptr);
      const std::string name = r.text("name");
      if (name.empty()) fail(r.at("name"), "map names must be non-empty");
      if (!index_.emplace(name, i).second) fail(r.at("name"), "duplicate map name '" + name + "'");
    }
  }

  bool knows(const std::string& name) const { return index_.count(name) > 0; }

  laurent::NormalizedMap by_name(const std::string& name, const std::string& ptr) {
    const auto it = index_.find(name);
    if (it == index_.end()) fail(ptr, "no map named '" + name + "'");
    if (active_.count(name)) fail(ptr, "map '" + name + "' refers to itself");
    active_.insert(name);
    auto m = build(records_[it->second], "/maps/" + std::to_string(it->second), true);
    active_.erase(name);
    return m;
  }

  // A reference is a map name or an inline record.
  laurent::NormalizedMap ref(const Json& v, const std::string& ptr) {
    if (v.is_string()) return by_name(v.get<std::string>(), ptr);
    return build(v, ptr, false);
  }

  laurent::NormalizedMap build(const Json& rec, const std::string& ptr, bool named) {
    using laurent::NormalizedMap;
    const Reader r(rec, ptr);
    const std::string type = r.text("type");
    auto allow = [&](std::initializer_list<const char*> keys) {
      std::vector<const char*> all(keys);
      all.push_back("type");
      if (named) all.push_back("name");
      // Reader::only takes an initializer list; check by hand here.
      for (auto it = rec.begin(); it != rec.end(); ++it) {
        bool ok = false;
        for (const char* a : all) ok = ok || it.key() == a;
        if (!ok) fail(ptr + "/" + it.key(), "unknown field for map type '" + type + "'");
      }
    };
    if (type == "identity") {
      allow({});
      return NormalizedMap::identity();
    }
    if (type == "joukowski") {
      allow({"sign", "scale", "center"});
      const double sign = r.number("sign");
      if (sign != 1.0 && sign != -1.0) fail(r.at("sign"), "must be +1 or -1");
      const double scale = r.number("scale");
      if (!(scale > 0.0)) fail(r.at("scale"), "must be positive");
      const Complex c = r.has("center") ? r.complex("center") : Complex{};
      return NormalizedMap::joukowski(static_cast<int>(sign), scale, c);
    }
    if (type == "exterior_square") {
      allow({"orientation"});
      const std::string o = r.has("orientation") ? r.text("orientation") : "axis";
      if (o == "axis") return NormalizedMap::exterior_square(laurent::SquareOrientation::axis);
      if (o == "diagonal")
        return NormalizedMap::exterior_square(laurent::SquareOrientation::diagonal);
      fail(r.at("orientation"), "expected 'axis' or 'diagonal'");
    }
    if (type == "multipole") {
      allow({"poles"});
      const Json& ps = r.raw("poles");
      if (!ps.is_array()) fail(r.at("poles"), "expected an array of pole records");
      std::vector<laurent::Pole> poles;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string pp = r.at("poles") + "/" + std::to_string(i);
        const Reader pr(ps[i], pp);
        pr.only({"location", "coefficients", "frame", "frame_scale"});
        laurent::Pole pole;
        pole.location = pr.complex("location");
        pole.frame = pr.has("frame") ? parse_frame(pr.text("frame"), pr.at("frame"))
                                     : laurent::PoleFrame::plain;
        if (pole.frame != laurent::PoleFrame::plain) {
          pole.frame_scale = pr.number("frame_scale");
          if (!(pole.frame_scale > 0.0)) fail(pr.at("frame_scale"), "must be positive");
        }
        const Json& cs = pr.raw("coefficients");
        if (!cs.is_array()) fail(pr.at("coefficients"), "expected an array of [re, im] pairs");
        for (std::size_t m = 0; m < cs.size(); ++m)
          pole.coefficients.push_back(
              Reader::as_complex(cs[m], pr.at("coefficients") + "/" + std::to_string(m)));
        poles.push_back(std::move(pole));
      }
      return NormalizedMap::multipole(std::move(poles));
    }
    if (type == "composition") {
      allow({"outer", "inner"});
      auto outer = ref(r.raw("outer"), r.at("outer"));
      auto inner = ref(r.raw("inner"), r.at("inner"));
      return NormalizedMap::composition(std::move(outer), std::move(inner));
    }
    if (type == "inverse") {
      allow({"of"});
      return NormalizedMap::inverse(ref(r.raw("of"), r.at("of")));
    }
    fail(r.at("type"), "unknown map type '" + type +
                           "' (identity, multipole, joukowski, exterior_square, "
                           "composition, inverse)");
  }

 private:
  const Json& records_;
  std::map<std::string, std::size_t> index_;
  std::set<std::string> active_;
};

std::vector<double> number_list(const Json& v, const std::string& ptr, bool positive) {
  if (!v.is_array()) fail(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = Reader::as_number(v[i], ptr + "/" + std::to_string(i));
    if (positive && !(d > 0.0)) fail(ptr + "/" + std::to_string(i), "must be positive");
    out.push_back(d);
  }
  return out;
}

bool needs_map(Command c) {
  return c == Command::functional || c == Command::modulus_check ||
         c == Command::area_asymptotics;
}

uniformize::OptimizerConfig parse_optimizer(const Json& j) {
  const Reader r(j, "/optimizer");
  r.only({"order", "restarts", "initial_step", "step_decay", "restart_kick", "max_evaluations",
          "penalty_weight", "auto_double_penalty", "objective_tolerance", "defect_tolerance",
          "defect_every", "maximize"});
  uniformize::OptimizerConfig c;
  c.order = r.count("order", c.order);
  c.restarts = r.count("restarts", c.restarts);
  c.initial_step = r.positive("initial_step", c.initial_step);
  c.step_decay = r.number("step_decay", c.step_decay);
  if (c.step_decay < 0.0) fail(r.at("step_decay"), "must be non-negative");
  c.restart_kick = r.number("restart_kick", c.restart_kick);
  if (c.restart_kick < 0.0) fail(r.at("restart_kick"), "must be non-negative");
  c.max_evaluations = r.count("max_evaluations", c.max_evaluations);
  c.penalty_weight = r.positive("penalty_weight", c.penalty_weight);
  c.auto_double_penalty = r.flag("auto_double_penalty", c.auto_double_penalty);
  c.objective_tolerance = r.positive("objective_tolerance", c.objective_tolerance);
  c.defect_tolerance = r.positive("defect_tolerance", c.defect_tolerance);
  c.defect_every = r.count("defect_every", c.defect_every);
  c.maximize = r.flag("maximize", c.maximize);
  if (c.order == 0) fail(r.at("order"), "must be at least 1");
  if (c.restarts == 0) fail(r.at("restarts"), "must be at least 1");
  if (c.max_evaluations == 0) fail(r.at("max_evaluations"), "must be at least 1");
  if (c.defect_every == 0) fail(r.at("defect_every"), "must be at least 1");
  return c;
}

Json optimizer_json(const uniformize::OptimizerConfig& c) {
  Json j;
  j["order"] = c.order;
  j["restarts"] = c.restarts;
  j["initial_step"] = c.initial_step;
  j["step_decay"] = c.step_decay;
  j["restart_kick"] = c.restart_kick;
  j["max_evaluations"] = c.max_evaluations;
  j["penalty_weight"] = c.penalty_weight;
  j["auto_double_penalty"] = c.auto_double_penalty;
  j["objective_tolerance"] = c.objective_tolerance;
  j["defect_tolerance"] = c.defect_tolerance;
  j["defect_every"] = c.defect_every;
  j["maximize"] = c.maximize;
  return j;
}

Json multipole_record(const std::string& name, std::span<const laurent::Pole> poles) {
  Json rec;
  rec["name"] = name;
  rec["type"] = "multipole";
  rec["poles"] = Json::array();
  for (const auto& p : poles) {
    Json pj;
    pj["location"] = complex_json(p.location);
    pj["frame"] = frame_name(p.frame);
    if (p.frame != laurent::PoleFrame::plain) pj["frame_scale"] = p.frame_scale;
    pj["coefficients"] = Json::array();
    for (const auto& c : p.coefficients) pj["coefficients"].push_back(complex_json(c));
    rec["poles"].push_back(pj);
  }
  return rec;
}

// -- tables -----------------------------------------------------------------

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::size_t cols_;
  std::ostringstream os_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string columns(const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& cols) {
  std::ostringstream os;
  os << "#";
  for (const auto& n : names) os << ' ' << n;
  os << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? " " : "") << num(cols[k][i]);
    os << '\n';
  }
  return os.str();
}

Json injectivity_json(const functional::InjectivityReport& r) {
  Json j;
  j["injective"] = r.injective;
  j["self_intersections"] = r.self_intersections;
  j["cross_intersections"] = r.cross_intersections;
  j["orientation_failures"] = r.orientation_failures;
  j["nested_length"] = r.nested_length;
  j["diagnostic"] = r.diagnostic;
  return j;
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

void functional_tables(const functional::FunctionalReport& rep, Json& payload,
                       std::map<std::string, std::string>& tables, const std::string& file) {
  payload["a1"] = complex_json(rep.a1.a1);
  payload["S"] = rep.S;
  payload["components"] = Json::array();
  std::vector<std::string> header{"j", "A_j", "V_j", "H_j", "square_defect", "a1_re", "a1_im", "S"};
  for (const auto& [a, l] : rep.L_values) header.push_back("L_alpha(" + num(a) + ")");
  Csv csv(header);
  for (const auto& c : rep.components) {
    Json cj;
    cj["j"] = c.j + 1;
    cj["A"] = c.A;
    cj["V"] = c.V;
    cj["H"] = c.H;
    cj["square_defect"] = c.square_defect;
    payload["components"].push_back(cj);
    std::vector<std::string> row{num(c.j + 1), num(c.A), num(c.V), num(c.H),
                                 num(c.square_defect), num(rep.a1.a1.real()),
                                 num(rep.a1.a1.imag()), num(rep.S)};
    for (const auto& [a, l] : rep.L_values) row.push_back(num(l));
    csv.row(row);
  }
  payload["L_values"] = Json::array();
  for (const auto& [a, l] : rep.L_values) payload["L_values"].push_back({{"alpha", a}, {"L", l}});
  payload["injectivity"] = injectivity_json(rep.injectivity);
  tables[file] = csv.str();
}

void run_functional(const ExperimentSpec& spec, RunReport& out) {
  const auto rep = functional::functional_S(spec.map(), spec.domain, spec.mesh, spec.alphas);
  Json payload;
  functional_tables(rep, payload, out.tables, "functional.csv");
  out.document["payload"] = payload;
}

modulus::ProbeOptions probe_options(const ExperimentSpec& spec) {
  modulus::ProbeOptions o;
  o.exponent = spec.exponent;
  return o;
}

void run_modulus(const ExperimentSpec& spec, RunReport& out) {
  const auto res = modulus::sandwich_check(spec.map(), spec.domain, spec.r_schedule, spec.mesh,
                                           probe_options(spec));
  Json payload;
  payload["S"] = res.S_functional;
  payload["a1"] = complex_json(res.a1);
  payload["fitted_exponent_area"] = number_json(res.fitted_exponent_area);
  payload["fitted_exponent_consistency"] = number_json(res.fitted_exponent_consistency);
  payload["worst_slack"] = res.worst_slack;
  payload["slack_tolerance"] = res.slack_tolerance;
  payload["probes"] = Json::array();
  Csv csv({"r", "l", "l_over_r", "r_over_l2", "A_of_r", "A_minus_4lr", "rho_sq_integral",
           "rho_sq_minus_4lr", "lower_bound", "lower_bound_minus_4lr", "slack",
           "consistency_residual", "line_integral_min_minus_2r", "fitted_C",
           "equality_probe_value", "quadrature_error", "fitted_exponent_area",
           "fitted_exponent_consistency"});
  std::vector<std::vector<double>> cols(4);
  for (const auto& p : res.probes) {
    Json pj;
    pj["r"] = p.r;
    pj["l"] = p.l;
    pj["A_of_r"] = p.A_of_r;
    pj["A_minus_4lr"] = p.A_minus_4lr;
    pj["rho_sq_integral"] = p.rho_sq_integral;
    pj["rho_sq_minus_4lr"] = p.rho_sq_minus_4lr;
    pj["lower_bound"] = p.lower_bound;
    pj["lower_bound_minus_4lr"] = p.lower_bound_minus_4lr;
    pj["slack"] = p.slack;
    pj["consistency_residual"] = p.consistency_residual;
    pj["line_integral_min_minus_2r"] = p.line_integral_min_minus_2r;
    pj["fitted_C"] = p.fitted_C;
    pj["equality_probe_value"] = p.equality_probe_value;
    pj["quadrature_error"] = p.quadrature_error;
    payload["probes"].push_back(pj);
    csv.row({num(p.r), num(p.l), num(p.l_over_r), num(p.r_over_l2), num(p.A_of_r),
             num(p.A_minus_4lr), num(p.rho_sq_integral), num(p.rho_sq_minus_4lr),
             num(p.lower_bound), num(p.lower_bound_minus_4lr), num(p.slack),
             num(p.consistency_residual), num(p.line_integral_min_minus_2r), num(p.fitted_C),
             num(p.equality_probe_value), num(p.quadrature_error),
             num(res.fitted_exponent_area), num(res.fitted_exponent_consistency)});
    cols[0].push_back(p.r);
    cols[1].push_back(p.A_minus_4lr);
    cols[2].push_back(p.rho_sq_minus_4lr);
    cols[3].push_back(p.slack);
  }
  out.document["payload"] = payload;
  out.tables["probes.csv"] = csv.str();
  out.plot_data["modulus.dat"] =
      columns({"r", "A_minus_4lr", "rho_sq_minus_4lr", "slack"}, cols);
}

void run_area(const ExperimentSpec& spec, RunReport& out) {
  const auto res =
      modulus::area_asymptotics(spec.map(), spec.domain, spec.r_schedule, probe_options(spec));
  Json payload;
  payload["a1"] = complex_json(res.a1);
  payload["limit"] = res.limit;
  payload["fitted_exponent"] = number_json(res.fitted_exponent);
  payload["rows"] = Json::array();
  Csv csv({"r", "l", "A_of_r", "A_minus_4lr", "residual", "fitted_exponent"});
  std::vector<std::vector<double>> cols(3);
  for (const auto& row : res.rows) {
    payload["rows"].push_back({{"r", row.r},
                               {"l", row.l},
                               {"A_of_r", row.A},
                               {"A_minus_4lr", row.A_minus_4lr},
                               {"residual", row.residual}});
    csv.row({num(row.r), num(row.l), num(row.A), num(row.A_minus_4lr), num(row.residual),
             num(res.fitted_exponent)});
    cols[0].push_back(row.r);
    cols[1].push_back(row.A_minus_4lr);
    cols[2].push_back(row.residual);
  }
  out.document["payload"] = payload;
  out.tables["area.csv"] = csv.str();
  out.plot_data["area.dat"] = columns({"r", "A_minus_4lr", "residual"}, cols);
}

void run_property(const ExperimentSpec& spec, RunReport& out) {
  uniformize::PropertyOptions opt;
  opt.mesh = spec.mesh;
  opt.tolerance = spec.tolerance;
  opt.order = spec.optimizer.order;
  const bool slit = spec.command == Command::slit_positivity;
  const auto rep =
      slit ? uniformize::slit_positivity(spec.domain, spec.samples, spec.amplitude, spec.seed, opt)
           : uniformize::verify_extremal(spec.domain, spec.samples, spec.amplitude, spec.seed, opt);
  Json payload;
  payload["objective"] = slit ? "Re_a1" : "S";
  payload["samples"] = rep.samples;
  payload["rejected"] = rep.rejected;
  payload["violations"] = rep.violations;
  payload["tolerance"] = rep.tolerance;
  payload["min"] = rep.min;
  payload["mean"] = rep.mean;
  payload["max"] = rep.max;
  payload["correlation"] = number_json(rep.correlation);
  if (rep.composite_a1) {
    payload["composite_a1"] = complex_json(*rep.composite_a1);
    payload["composite_contour_a1"] = complex_json(*rep.composite_contour_a1);
  }
  const std::string value = slit ? "Re_a1" : "S";
  Csv csv({"sample", value, "norm"});
  for (std::size_t i = 0; i < rep.values.size(); ++i)
    csv.row({num(i + 1), num(rep.values[i]), num(rep.norms[i])});
  out.tables["samples.csv"] = csv.str();
  out.plot_data["samples.dat"] = columns({"norm", value}, {rep.norms, rep.values});
  out.document["payload"] = payload;
  out.property_violated =
      rep.violations > 0 || (rep.composite_a1 && rep.composite_a1->real() < -rep.tolerance);
}

void run_uniformize(const ExperimentSpec& spec, RunReport& out) {
  const bool slit = spec.command == Command::slit_uniformize;
  const auto res = slit ? uniformize::minimize_L(spec.domain, spec.alpha, spec.optimizer)
                        : uniformize::minimize_S(spec.domain, spec.optimizer);
  Json payload;
  payload[slit ? "L_min" : "S_min"] = res.objective;
  payload["converged"] = res.converged;
  payload["status"] = res.status;
  if (!slit && spec.optimizer.maximize) payload["exploratory_maximize"] = true;
  payload["map"] = multipole_record("minimizer", res.poles);
  payload["coefficient_norm_inf"] = res.coefficient_norm_inf;
  payload["square_defects"] = res.square_defects;
  if (slit) payload["transverse_extents"] = res.transverse_extents;
  payload["restart_objectives"] = res.restart_objectives;
  Json norms = Json::array();
  for (double v : res.restart_coefficient_norms) norms.push_back(number_json(v));
  payload["restart_coefficient_norms"] = norms;
  payload["evaluations"] = res.evaluations;
  payload["final_penalty_weight"] = res.final_penalty_weight;
  payload["penalty_dominance"] = res.penalty_dominance;
  Json image;
  functional_tables(res.report, image, out.tables, "components.csv");
  payload["image"] = image;

  Csv trace({"iter", "restart", "S", "penalty", "feasible", "max_defect"});
  std::vector<std::vector<double>> cols(3);
  for (const auto& row : res.trace) {
    trace.row({num(row.iter), num(row.restart), num(row.S), num(row.penalty),
               row.feasible ? "1" : "0", num(row.max_defect)});
    cols[0].push_back(static_cast<double>(row.iter));
    cols[1].push_back(row.S);
    cols[2].push_back(row.max_defect);
  }
  out.tables["trace.csv"] = trace.str();
  out.plot_data["trace.dat"] = columns({"iter", "S", "max_defect"}, cols);
  out.document["payload"] = payload;
  if (!res.converged) {
    out.document["payload"]["exit_reason"] = "optimizer did not converge";
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string command_name(Command c) {
  for (const auto& e : kCommands)
    if (e.cmd == c) return e.name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& e : kCommands)
    if (name == e.name) return e.cmd;
  std::string valid;
  for (const auto& e : kCommands) valid += (valid.empty() ? "" : ", ") + std::string(e.name);
  throw SpecError("unknown command '" + name + "' (" + valid + ")");
}

laurent::NormalizedMap ExperimentSpec::map() const {
  if (map_name.empty()) return laurent::NormalizedMap::identity();
  return map(map_name);
}

laurent::NormalizedMap ExperimentSpec::map(const std::string& name) const {
  MapResolver resolver(map_records);
  return resolver.by_name(name, "/map");
}

Json ExperimentSpec::to_json() const {
  Json j;
  j["command"] = command_name(command);
  j["domain"] = domain_records;
  j["maps"] = map_records;
  if (!map_name.empty()) j["map"] = map_name;
  j["mesh"] = mesh;
  j["r_schedule"] = r_schedule;
  j["alphas"] = alphas;
  j["alpha"] = alpha;
  j["exponent"] = exponent;
  j["seed"] = seed;
  j["samples"] = samples;
  j["amplitude"] = amplitude;
  j["tolerance"] = tolerance;
  j["optimizer"] = optimizer_json(optimizer);
  return j;
}

ExperimentSpec parse_json(const Json& doc) {
  const Reader r(doc, "");
  r.only({"command", "domain", "maps", "map", "mesh", "r_schedule", "alphas", "alpha",
          "exponent", "seed", "samples", "amplitude", "tolerance", "optimizer"});
  ExperimentSpec s;
  try {
    s.command = parse_command(r.text("command"));
  } catch (const SpecError& e) {
    fail("/command", e.what());
  }
  s.domain_records = r.raw("domain");
  s.domain = parse_domain(s.domain_records);

  if (r.has("maps")) {
    s.map_records = r.raw("maps");
    if (!s.map_records.is_array()) fail("/maps", "expected an array of map records");
  }
  MapResolver resolver(s.map_records);
  // Build every record once so that errors surface at parse time.
  for (std::size_t i = 0; i < s.map_records.size(); ++i)
    resolver.by_name(s.map_records[i]["name"].get<std::string>(), "/maps/" + std::to_string(i));
  if (r.has("map")) {
    s.map_name = r.text("map");
    if (!resolver.knows(s.map_name)) fail("/map", "no map named '" + s.map_name + "'");
  } else if (!s.map_records.empty()) {
    s.map_name = s.map_records[0]["name"].get<std::string>();
  }
  if (needs_map(s.command) && s.map_records.empty())
    fail("/maps", "command '" + command_name(s.command) + "' needs at least one map");

  s.mesh = r.positive("mesh", 1e-3);
  if (r.has("r_schedule")) {
    s.r_schedule = number_list(r.raw("r_schedule"), "/r_schedule", true);
    if (s.r_schedule.empty()) fail("/r_schedule", "must not be empty");
  } else {
    s.r_schedule = {1e2, 1e3, 1e4};
  }
  if (r.has("alphas")) s.alphas = number_list(r.raw("alphas"), "/alphas", false);
  s.alpha = r.number("alpha", 0.0);
  s.exponent = r.positive("exponent", 2.0 / 3.0);
  if (!(s.exponent < 1.0)) fail("/exponent", "must lie in (0, 1)");
  if (r.has("seed")) {
    const Json& v = r.raw("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail("/seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  s.samples = r.count("samples", 200);
  if (s.samples == 0) fail("/samples", "must be at least 1");
  s.amplitude = r.number("amplitude", 0.1);
  if (s.amplitude < 0.0) fail("/amplitude", "must be non-negative");
  s.tolerance = r.positive("tolerance", 1e-4);
  if (r.has("optimizer")) s.optimizer = parse_optimizer(r.raw("optimizer"));
  s.optimizer.mesh = s.mesh;
  s.optimizer.seed = s.seed;

  if (s.command == Command::verify_extremal && !s.domain.is_square_domain())
    fail("/domain", "verify-extremal needs a square domain (axis squares and points)");
  if (s.command == Command::slit_positivity && !s.domain.is_vertical_slit_domain())
    fail("/domain", "slit-positivity needs a vertical slit domain (vertical slits and points)");
  if (s.command == Command::modulus_check && !s.domain.is_square_domain())
    fail("/domain", "modulus-check needs a square domain");
  if ((s.command == Command::uniformize || s.command == Command::slit_uniformize) &&
      s.domain.empty())
    fail("/domain", "a uniformizer needs at least one component");
  if (s.optimizer.maximize && s.command != Command::uniformize)
    fail("/optimizer/maximize", "only the uniformize command accepts maximize");
  return s;
}

ExperimentSpec parse_spec(const std::filesystem::path& path, std::optional<Command> command) {
  std::ifstream in(path);
  if (!in) throw SpecError(path.string() + ": cannot open");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  if (command && doc.is_object()) {
    if (!doc.contains("command")) {
      doc["command"] = command_name(*command);
    } else if (doc["command"].is_string() &&
               doc["command"].get<std::string>() != command_name(*command)) {
      throw SpecError(path.string() + ": /command: spec is for '" +
                      doc["command"].get<std::string>() + "' but the subcommand is '" +
                      command_name(*command) + "'");
    }
  }
  try {
    return parse_json(doc);
  } catch (const SpecError& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
}

void apply(ExperimentSpec& spec, const Overrides& o) {
  if (o.seed) {
    spec.seed = *o.seed;
    spec.optimizer.seed = *o.seed;
  }
  if (o.mesh) {
    if (!(*o.mesh > 0.0)) throw SpecError("--mesh: must be positive");
    spec.mesh = *o.mesh;
    spec.optimizer.mesh = *o.mesh;
  }
  if (o.maximize) {
    if (spec.command != Command::uniformize)
      throw SpecError("--maximize: only the uniformize command accepts it");
    spec.optimizer.maximize = true;
  }
}

RunReport run(const ExperimentSpec& spec) {
  RunReport out;
  out.command = spec.command;
  out.document["echo"] = spec.to_json();
  const auto t0 = std::chrono::steady_clock::now();
  switch (spec.command) {
    case Command::functional: run_functional(spec, out); break;
    case Command::modulus_check: run_modulus(spec, out); break;
    case Command::area_asymptotics: run_area(spec, out); break;
    case Command::verify_extremal:
    case Command::slit_positivity: run_property(spec, out); break;
    case Command::uniformize:
    case Command::slit_uniformize: run_uniformize(spec, out); break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.document["meta"] = {{"version", kVersion},
                          {"command", command_name(spec.command)},
                          {"threads", max_threads()},
                          {"seconds", seconds}};
  return out;
}

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text) {
  const auto p = dir / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw SpecError(p.string() + ": cannot write");
  f << text;
  return p;
}

}  // namespace

std::vector<std::filesystem::path> write_report(const RunReport& report,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  files.push_back(write_text(dir, "report.json", report.document.dump(2) + "\n"));
  for (const auto& [name, text] : report.tables) files.push_back(write_text(dir, name, text));
  return files;
}

std::vector<std::filesystem::path> emit_plot_data(const RunReport& report,
                                                  const std::filesystem::path& dir) {
  if (report.plot_data.empty())
    throw SpecError("command '" + command_name(report.command) +
                    "' produces no sequence data to plot");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (const auto& [name, text] : report.plot_data) files.push_back(write_text(dir, name, text));
  return files;
}

}  // namespace squaremap::experiment
