#include "gha/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gha/error.hpp"
#include "json.hpp"

namespace gha {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    raise(ErrorCode::ParseError, source_ + ":" + std::to_string(line_of(field)) + ": field '" + field +
                                     "': " + message);
  }

  std::optional<double> number(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number()) fail(path + key, "expected a number");
    return v.get<double>();
  }

  std::optional<long long> integer(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + key, "expected an integer");
    return v.get<long long>();
  }

  std::optional<std::string> string(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_string()) fail(path + key, "expected a string");
    return v.get<std::string>();
  }

  const Json* object(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) return nullptr;
    const Json& v = obj.at(key);
    if (!v.is_object()) fail(path + key, "expected an object");
    return &v;
  }

  // first line mentioning the innermost key; 1 when it cannot be located
  int line_of(const std::string& field) const {
    const auto dot = field.find_last_of('.');
    const std::string key = "\"" + (dot == std::string::npos ? field : field.substr(dot + 1)) + "\"";
    const auto pos = text_.find(key);
    if (pos == std::string_view::npos) return 1;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  int line_at_byte(std::size_t byte) const {
    const std::size_t end = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(end), '\n'));
  }

  const std::string& source() const { return source_; }

 private:
  std::string_view text_;
  std::string source_;
};

void collect_unknown(const Json& obj, const std::vector<std::string>& allowed, const std::string& path,
                     std::vector<std::string>& violations) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      if (path.empty() && (key == "f_a" || key == "f_b")) {
        violations.push_back("'" + key + "': separate characteristic functions for a and b are not "
                             "supported; a single f drives both ladders");
      } else {
        violations.push_back("unknown key '" + path + key + "'");
      }
    }
  }
}

std::optional<Profile> read_profile(const Reader& rd, const Json& obj, const std::string& path,
                                    std::vector<std::string>& violations) {
  collect_unknown(obj, {"kind", "alpha", "k0"}, path, violations);
  const auto kind = rd.string(obj, "kind", path);
  const auto alpha = rd.number(obj, "alpha", path);
  const auto k0 = rd.integer(obj, "k0", path);
  if (!kind) {
    violations.push_back("'" + path + "kind' is required");
    return std::nullopt;
  }
  if (*kind == "rational_pt" || *kind == "tanh_shift") {
    if (alpha || k0) violations.push_back("'" + path + "alpha'/'k0' apply only to inverse_cosine");
    return *kind == "rational_pt" ? Profile::rational_pt() : Profile::tanh_shift();
  }
  if (*kind == "inverse_cosine") {
    const double a = alpha.value_or(2.0);
    const long long k = k0.value_or(1);
    if (!(a > 1.0)) violations.push_back("'" + path + "alpha' must exceed 1");
    if (k < 1) violations.push_back("'" + path + "k0' must be >= 1");
    return Profile::inverse_cosine(a, static_cast<int>(std::max(1LL, k)));
  }
  violations.push_back("'" + path + "kind' has unknown value '" + *kind + "'");
  return std::nullopt;
}

std::optional<SimilarityRecipe> read_deformation(const Reader& rd, const Json& obj,
                                                 std::vector<std::string>& violations) {
  const std::string path = "deformation.";
  const auto kind = rd.string(obj, "kind", path);
  if (kind && *kind == "diagonal_of_number") {
    collect_unknown(obj, {"kind", "sigma"}, path, violations);
    const Json* sigma = rd.object(obj, "sigma", path);
    if (!sigma) {
      violations.push_back("'deformation.sigma' is required for diagonal_of_number");
      return std::nullopt;
    }
    auto p = read_profile(rd, *sigma, path + "sigma.", violations);
    if (!p) return std::nullopt;
    return SimilarityRecipe::diagonal_of_number(*p);
  }
  auto p = read_profile(rd, obj, path, violations);
  if (!p) return std::nullopt;
  return SimilarityRecipe::multiplication(*p);
}

OrderedJson profile_json(const Profile& p) {
  OrderedJson j;
  switch (p.kind) {
    case Profile::Kind::RationalPT: j["kind"] = "rational_pt"; break;
    case Profile::Kind::TanhShift: j["kind"] = "tanh_shift"; break;
    case Profile::Kind::InverseCosine:
      j["kind"] = "inverse_cosine";
      j["alpha"] = p.alpha;
      j["k0"] = p.k0;
      break;
    case Profile::Kind::CustomSamples: j["kind"] = "custom_samples"; break;
  }
  return j;
}

std::string model_key(ModelKind k) {
  switch (k) {
    case ModelKind::PoschlTeller: return "poschl_teller";
    case ModelKind::InfiniteWell: return "infinite_well";
    case ModelKind::HarmonicOscillator: return "harmonic_oscillator";
    case ModelKind::Quon: return "quon";
    case ModelKind::PseudoBosonPower: return "pseudo_boson_power";
  }
  return "unknown";
}

}  // namespace

const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names{"spectrum", "eigenvalues", "potential"};
  return names;
}

Grid RunConfig::resolved_grid() const {
  const auto interval = model_interval(model);
  if (!interval) raise(ErrorCode::Unsupported, model.name() + " has no position realization");
  return Grid::make(grid.x_min.value_or(interval->first), grid.x_max.value_or(interval->second),
                    grid.n_points);
}

void RunConfig::validate() const {
  std::vector<std::string> v;
  if (schema_version != kSchemaVersion) {
    v.push_back("schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                std::to_string(kSchemaVersion) + ")");
  }
  try {
    model.validate();
  } catch (const Error& e) {
    v.push_back(e.detail());
  }
  if (N < 4 || N > 1024) v.push_back("truncation.N must lie in [4, 1024]");
  if (margin < 0 || margin >= N) v.push_back("truncation.margin must satisfy 0 <= margin < N");
  if (grid.n_points < 16) v.push_back("grid.n_points must be >= 16");
  if (grid.x_min && grid.x_max && !(*grid.x_max > *grid.x_min)) v.push_back("grid.x_max must exceed grid.x_min");
  if (n_max < -1 || (n_max >= 0 && n_max + margin > N)) v.push_back("n_max must satisfy n_max + margin <= N");
  const std::pair<const char*, double> tols[] = {
      {"algebra", tolerances.algebra},         {"grid_algebra", tolerances.grid_algebra},
      {"eigen", tolerances.eigen},             {"quadrature", tolerances.quadrature},
      {"biorthogonality", tolerances.biorthogonality}, {"similarity", tolerances.similarity}};
  for (const auto& [name, value] : tols) {
    if (!(value > 0.0)) v.push_back(std::string("tolerances.") + name + " must be > 0");
  }
  for (const auto& o : outputs) {
    const auto& known = known_outputs();
    if (std::find(known.begin(), known.end(), o) == known.end()) v.push_back("unknown output '" + o + "'");
  }
  if (!v.empty()) {
    std::ostringstream os;
    os << v.size() << " violation(s):";
    for (const auto& s : v) os << "\n  - " << s;
    raise(ErrorCode::ValidationError, os.str());
  }
}

std::string RunConfig::to_json() const {
  OrderedJson j;
  j["schema_version"] = schema_version;
  j["model"] = model_key(model.kind);
  if (model.kind == ModelKind::PoschlTeller) j["lambda"] = model.lambda;
  if (model.kind == ModelKind::Quon) j["q"] = model.q;
  if (model.kind == ModelKind::PseudoBosonPower) j["k"] = model.k;
  if (model.deformation) {
    const auto& d = *model.deformation;
    if (d.kind == SimilarityRecipe::Kind::DiagonalOfNumber) {
      j["deformation"] = {{"kind", "diagonal_of_number"}, {"sigma", profile_json(d.profile)}};
    } else {
      j["deformation"] = profile_json(d.profile);
    }
  } else {
    j["deformation"] = nullptr;
  }
  j["truncation"] = {{"N", N}, {"margin", margin}};
  OrderedJson g;
  if (const auto interval = model_interval(model)) {
    g["x_min"] = grid.x_min.value_or(interval->first);
    g["x_max"] = grid.x_max.value_or(interval->second);
  }
  g["n_points"] = grid.n_points;
  j["grid"] = g;
  j["n_max"] = family_depth();
  j["tolerances"] = {{"algebra", tolerances.algebra},
                     {"grid_algebra", tolerances.grid_algebra},
                     {"eigen", tolerances.eigen},
                     {"quadrature", tolerances.quadrature},
                     {"biorthogonality", tolerances.biorthogonality},
                     {"similarity", tolerances.similarity}};
  j["seed"] = seed;
  j["outputs"] = outputs;
  return j.dump(2);
}

RunConfig parse_config_text(std::string_view text, const std::string& source) {
  Reader rd(text, source);
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    raise(ErrorCode::ParseError, source + ":" + std::to_string(rd.line_at_byte(e.byte)) + ": " + e.what());
  }
  if (!root.is_object()) raise(ErrorCode::ParseError, source + ":1: top level must be an object");

  std::vector<std::string> violations;
  collect_unknown(root,
                  {"schema_version", "model", "lambda", "q", "k", "deformation", "truncation", "grid", "n_max",
                   "tolerances", "seed", "outputs"},
                  "", violations);

  RunConfig cfg;
  if (const auto sv = rd.integer(root, "schema_version", "")) cfg.schema_version = static_cast<int>(*sv);

  const auto model = rd.string(root, "model", "");
  const auto lambda = rd.number(root, "lambda", "");
  const auto q = rd.number(root, "q", "");
  const auto k = rd.integer(root, "k", "");
  if (!model) {
    violations.push_back("'model' is required");
  } else if (*model == "infinite_well") {
    cfg.model = ModelSpec::infinite_well();
  } else if (*model == "poschl_teller") {
    cfg.model = ModelSpec::poschl_teller(lambda.value_or(2.0));
  } else if (*model == "harmonic_oscillator") {
    cfg.model = ModelSpec::harmonic_oscillator();
  } else if (*model == "quon") {
    cfg.model = ModelSpec::quon(q.value_or(0.5));
  } else if (*model == "pseudo_boson_power") {
    cfg.model = ModelSpec::pseudo_boson_power(static_cast<int>(k.value_or(1)));
  } else {
    violations.push_back("'model' has unknown value '" + *model + "'");
  }
  if (model) {
    if (lambda && *model != "poschl_teller") violations.push_back("'lambda' applies only to poschl_teller");
    if (q && *model != "quon") violations.push_back("'q' applies only to quon");
    if (k && *model != "pseudo_boson_power") violations.push_back("'k' applies only to pseudo_boson_power");
  }

  if (root.contains("deformation") && !root.at("deformation").is_null()) {
    const Json* d = rd.object(root, "deformation", "");
    if (auto recipe = read_deformation(rd, *d, violations)) cfg.model.deformation = *recipe;
  }

  bool margin_given = false;
  if (const Json* t = rd.object(root, "truncation", "")) {
    collect_unknown(*t, {"N", "margin"}, "truncation.", violations);
    if (const auto n = rd.integer(*t, "N", "truncation.")) cfg.N = *n;
    if (const auto m = rd.integer(*t, "margin", "truncation.")) {
      cfg.margin = *m;
      margin_given = true;
    }
  }
  if (!margin_given) cfg.margin = default_margin(cfg.N);

  if (const Json* g = rd.object(root, "grid", "")) {
    collect_unknown(*g, {"x_min", "x_max", "n_points"}, "grid.", violations);
    cfg.grid.x_min = rd.number(*g, "x_min", "grid.");
    cfg.grid.x_max = rd.number(*g, "x_max", "grid.");
    if (const auto n = rd.integer(*g, "n_points", "grid.")) cfg.grid.n_points = static_cast<int>(*n);
  }
  if (const auto n = rd.integer(root, "n_max", "")) {
    cfg.n_max = static_cast<int>(*n);
    if (*n < 0) violations.push_back("'n_max' must be non-negative");
  }

  if (const Json* t = rd.object(root, "tolerances", "")) {
    collect_unknown(*t, {"algebra", "grid_algebra", "eigen", "quadrature", "biorthogonality", "similarity"},
                    "tolerances.", violations);
    auto& tol = cfg.tolerances;
    tol.algebra = rd.number(*t, "algebra", "tolerances.").value_or(tol.algebra);
    tol.grid_algebra = rd.number(*t, "grid_algebra", "tolerances.").value_or(tol.grid_algebra);
    tol.eigen = rd.number(*t, "eigen", "tolerances.").value_or(tol.eigen);
    tol.quadrature = rd.number(*t, "quadrature", "tolerances.").value_or(tol.quadrature);
    tol.biorthogonality = rd.number(*t, "biorthogonality", "tolerances.").value_or(tol.biorthogonality);
    tol.similarity = rd.number(*t, "similarity", "tolerances.").value_or(tol.similarity);
  }
  if (root.contains("seed")) {
    const Json& s = root.at("seed");
    if (!s.is_number_unsigned()) rd.fail("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("outputs")) {
    const Json& o = root.at("outputs");
    if (!o.is_array()) rd.fail("outputs", "expected an array of strings");
    cfg.outputs.clear();
    for (const auto& item : o) {
      if (!item.is_string()) rd.fail("outputs", "expected an array of strings");
      cfg.outputs.push_back(item.get<std::string>());
    }
  }

  try {
    cfg.validate();
  } catch (const Error& e) {
    if (violations.empty()) throw;
    // merge with the structural violations so the caller sees everything at once
    const std::string& msg = e.detail();
    const auto nl = msg.find('\n');
    if (nl != std::string::npos) {
      std::istringstream rest(msg.substr(nl + 1));
      for (std::string line; std::getline(rest, line);) {
        if (line.rfind("  - ", 0) == 0) violations.push_back(line.substr(4));
      }
    }
  }
  if (!violations.empty()) {
    std::ostringstream os;
    os << violations.size() << " violation(s):";
    for (const auto& s : violations) os << "\n  - " << s;
    raise(ErrorCode::ValidationError, os.str());
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace gha
