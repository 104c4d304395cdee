#include "riesz/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/reader.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include "riesz/error.hpp"
#include "riesz/schema_text.hpp"

namespace riesz {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + file.string());
  return out;
}

}  // namespace

void write_points_csv(const fs::path& file, const Configuration& config) {
  auto out = open_out(file);
  const std::size_t dim = config.set().ambient_dim();
  for (std::size_t k = 0; k < dim; ++k) out << (k ? "," : "") << 'x' << k;
  out << '\n';
  for (const Point& p : config.points()) {
    for (std::size_t k = 0; k < dim; ++k) out << (k ? "," : "") << format_double(p[k]);
    out << '\n';
  }
}

void write_energies_csv(const fs::path& file, const std::vector<EnergyRow>& rows) {
  auto out = open_out(file);
  out << "N,energy,energy_over_tau,iterations,converged,start\n";
  for (const EnergyRow& r : rows)
    out << r.n << ',' << format_double(r.energy) << ',' << format_double(r.normalized) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.start << '\n';
}

void write_distribution_csv(const fs::path& file, const DistributionTest& t) {
  auto out = open_out(file);
  out << "region_id,count,empirical,target,abs_error\n";
  for (std::size_t i = 0; i < t.empirical.size(); ++i)
    out << i << ',' << t.counts[i] << ',' << format_double(t.empirical[i]) << ','
        << format_double(t.target[i]) << ',' << format_double(std::fabs(t.empirical[i] - t.target[i]))
        << '\n';
}

void write_separation_csv(const fs::path& file, const SeparationSeries& series) {
  auto out = open_out(file);
  out << "N,delta,delta_normalized,running_min\n";
  for (const SeparationEntry& e : series.entries)
    out << e.n << ',' << format_double(e.delta) << ',' << format_double(e.normalized) << ','
        << format_double(e.running_min) << '\n';
}

void write_json(const fs::path& file, const Json& value) {
  auto out = open_out(file);
  out << value.dump(2) << '\n';
}

std::vector<std::string> write_artifacts(const fs::path& dir, const Artifacts& a) {
  fs::create_directories(dir);
  std::vector<std::string> names;
  if (a.points) {
    write_points_csv(dir / "points.csv", *a.points);
    names.emplace_back("points.csv");
  }
  if (!a.energies.empty()) {
    write_energies_csv(dir / "energies.csv", a.energies);
    names.emplace_back("energies.csv");
  }
  if (a.fit) {
    write_json(dir / "fit.json", *a.fit);
    names.emplace_back("fit.json");
  }
  if (a.distribution) {
    write_distribution_csv(dir / "distribution.csv", *a.distribution);
    names.emplace_back("distribution.csv");
  }
  if (a.separation) {
    write_separation_csv(dir / "separation.csv", *a.separation);
    names.emplace_back("separation.csv");
  }
  if (a.summary) {
    write_json(dir / "summary.json", *a.summary);
    names.emplace_back("summary.json");
  }
  return names;
}

namespace {

// JSON has no infinities; they are spelled as strings.
Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

Json to_json(const ScalingFit& fit) {
  Json j;
  j["g_hat"] = number(fit.g_hat);
  j["model"] = "E/tau = g*(1 + a*N^-p)";
  j["a"] = number(fit.a);
  j["p"] = number(fit.p);
  j["residual_norm"] = number(fit.residual_norm);
  j["n_min"] = fit.n_min;
  j["n_max"] = fit.n_max;
  j["richardson_fallback"] = fit.richardson_fallback;
  j["c_hat"] = number(fit.c_hat);
  return j;
}

Json to_json(const DistributionTest& t) {
  Json j;
  j["sup_error"] = number(t.sup_error);
  j["l1_error"] = number(t.l1_error);
  j["regions"] = t.empirical.size();
  return j;
}

Json to_json(const SeparationSeries& series) {
  Json j;
  j["s"] = series.s;
  j["alpha"] = series.alpha;
  j["running_min"] = number(series.running_min());
  Json rows = Json::array();
  for (const SeparationEntry& e : series.entries)
    rows.push_back({{"N", e.n}, {"delta", number(e.delta)}, {"normalized", number(e.normalized)}});
  j["entries"] = rows;
  return j;
}

std::string_view config_schema() { return detail::kConfigSchema; }

namespace {

// Records the byte offset of every JSON pointer while a document is read,
// so schema errors can name a line.
class PositionIndex {
 public:
  explicit PositionIndex(std::string_view text) : text_(text) {
    std::string copy(text);
    rapidjson::StringStream stream(copy.c_str());
    Handler h{this, &stream};
    rapidjson::Reader reader;
    reader.Parse(stream, h);
  }

  int line_of(const std::string& pointer) const {
    std::string p = pointer;
    for (;;) {
      auto it = offsets_.find(p);
      if (it != offsets_.end()) return line_at(it->second);
      if (p.empty()) return 1;
      p = p.substr(0, p.rfind('/'));
    }
  }

  int line_at(std::size_t offset) const {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    return line;
  }

 private:
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
  };

  struct Handler : rapidjson::BaseReaderHandler<rapidjson::UTF8<>, Handler> {
    PositionIndex* self;
    rapidjson::StringStream* stream;
    Handler(PositionIndex* s, rapidjson::StringStream* st) : self(s), stream(st) {}

    bool Default() {
      self->mark(stream->Tell());
      self->after_value();
      return true;
    }
    bool String(const char*, rapidjson::SizeType, bool) { return Default(); }
    bool StartObject() {
      self->mark(stream->Tell());
      self->frames_.push_back({false, 0, {}});
      return true;
    }
    bool Key(const char* k, rapidjson::SizeType len, bool) {
      self->frames_.back().key.assign(k, len);
      self->mark(stream->Tell());
      return true;
    }
    bool EndObject(rapidjson::SizeType) {
      self->frames_.pop_back();
      self->after_value();
      return true;
    }
    bool StartArray() {
      self->mark(stream->Tell());
      self->frames_.push_back({true, 0, {}});
      return true;
    }
    bool EndArray(rapidjson::SizeType) { return EndObject(0); }
  };

  std::string pointer() const {
    std::string p;
    for (const Frame& f : frames_) {
      p += '/';
      p += f.array ? std::to_string(f.index) : f.key;
    }
    return p;
  }
  void mark(std::size_t offset) { offsets_.emplace(pointer(), offset); }
  void after_value() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }

  std::string_view text_;
  std::vector<Frame> frames_;
  std::map<std::string, std::size_t> offsets_;
};

std::string stringify(const rapidjson::Pointer& p) {
  rapidjson::StringBuffer sb;
  p.Stringify(sb);
  return sb.GetString();
}

[[noreturn]] void schema_error(std::string_view source, int line, const std::string& msg) {
  throw Error(ErrorKind::Schema, std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

const rapidjson::Value* resolve(const rapidjson::Document& doc, const std::string& pointer) {
  return rapidjson::Pointer(pointer.c_str()).Get(doc);
}

std::string describe(const std::string& where, const char* keyword, const rapidjson::Document& schema,
                     const std::string& schema_ptr, const rapidjson::Document& doc) {
  const std::string at = where.empty() ? "config" : "'" + where + "'";
  const std::string kw = keyword;
  const rapidjson::Value* rule = resolve(schema, schema_ptr);
  const rapidjson::Value* value = resolve(doc, where);
  if (kw == "required" && rule && rule->HasMember("required") && value && value->IsObject()) {
    std::string missing;
    for (const auto& r : (*rule)["required"].GetArray())
      if (!value->HasMember(r.GetString())) missing += std::string(missing.empty() ? "" : ", ") + r.GetString();
    return at + " is missing required field(s): " + missing;
  }
  if (kw == "additionalProperties" && rule && rule->HasMember("properties") && value &&
      value->IsObject()) {
    std::string extra;
    for (const auto& m : value->GetObject())
      if (!(*rule)["properties"].HasMember(m.name.GetString()))
        extra += std::string(extra.empty() ? "" : ", ") + m.name.GetString();
    return at + " has unknown field(s): " + extra;
  }
  if (kw == "additionalProperties" && !where.empty()) {
    const std::size_t cut = where.rfind('/');
    const std::string parent = where.substr(0, cut);
    return (parent.empty() ? std::string("config") : "'" + parent + "'") + " has unknown field '" +
           where.substr(cut + 1) + "'";
  }
  if (kw == "oneOf") return at + " does not match any allowed form (check 'kind' and its fields)";
  if (kw == "enum") return at + " is not one of the allowed values";
  if (kw == "type") return at + " has the wrong type";
  if (kw == "minimum" || kw == "maximum") return at + " is out of range";
  if (kw == "minItems" || kw == "maxItems") return at + " has the wrong number of items";
  return at + " violates schema rule '" + kw + "'";
}

// RapidJSON only reports that a oneOf failed, at the union itself. Re-validate
// the value against the branch its "kind" selects to find the real problem.
[[noreturn]] void report_failure(std::string_view source, const PositionIndex& index,
                                 const rapidjson::Document& doc, const rapidjson::Value& defs,
                                 const rapidjson::SchemaValidator& v, const rapidjson::Document& sdoc,
                                 const std::string& prefix) {
  const std::string where = prefix + stringify(v.GetInvalidDocumentPointer());
  const std::string rule = stringify(v.GetInvalidSchemaPointer());
  const std::string kw = v.GetInvalidSchemaKeyword();
  const rapidjson::Value* node = resolve(sdoc, rule);
  while (node && node->IsObject() && node->HasMember("$ref") && (*node)["$ref"].IsString())
    node = resolve(sdoc, std::string((*node)["$ref"].GetString()).substr(1));
  const rapidjson::Value* value = resolve(doc, where);
  if (kw == "oneOf" && node && node->HasMember("oneOf") && value && value->IsObject() &&
      value->HasMember("kind") && (*value)["kind"].IsString()) {
    const std::string kind = (*value)["kind"].GetString();
    for (const auto& branch : (*node)["oneOf"].GetArray()) {
      if (!branch.HasMember("properties") || !branch["properties"].HasMember("kind")) continue;
      bool match = false;
      for (const auto& k : branch["properties"]["kind"]["enum"].GetArray())
        match = match || (k.IsString() && kind == k.GetString());
      if (!match) continue;
      rapidjson::Document bd;
      bd.CopyFrom(branch, bd.GetAllocator());
      rapidjson::Value copy(defs, bd.GetAllocator());
      bd.AddMember("definitions", copy, bd.GetAllocator());
      rapidjson::SchemaDocument bs(bd);
      rapidjson::SchemaValidator bv(bs);
      if (!value->Accept(bv)) report_failure(source, index, doc, defs, bv, bd, where);
      break;
    }
    schema_error(source, index.line_of(where + "/kind"), "'" + where + "/kind' has unknown value '" + kind + "'");
  }
  schema_error(source, index.line_of(where), describe(where, kw.c_str(), sdoc, rule, doc));
}

}  // namespace

Json parse_run_config(std::string_view text, std::string_view source) {
  const std::string copy(text);
  rapidjson::Document doc;
  doc.Parse(copy.c_str());
  PositionIndex index(text);
  if (doc.HasParseError())
    schema_error(source, index.line_at(doc.GetErrorOffset()),
                 std::string("invalid JSON: ") + rapidjson::GetParseError_En(doc.GetParseError()));

  rapidjson::Document sdoc;
  const std::string schema_text(config_schema());
  sdoc.Parse(schema_text.c_str());
  if (sdoc.HasParseError()) throw Error(ErrorKind::Schema, "embedded schema is not valid JSON");
  rapidjson::SchemaDocument schema(sdoc);
  rapidjson::SchemaValidator validator(schema);
  if (!doc.Accept(validator)) report_failure(source, index, doc, sdoc["definitions"], validator, sdoc, "");

  Json cfg = Json::parse(copy);
  // Cross-field rules the schema cannot express.
  const std::string exp = cfg["experiment"];
  auto need = [&](const char* key) {
    if (!cfg.contains(key))
      schema_error(source, 1, "experiment '" + exp + "' needs field '" + key + "'");
  };
  if (exp == "constants") {
    need("d");
    if (cfg["s"].get<double>() <= cfg["d"].get<double>())
      schema_error(source, index.line_of("/s"), "constants needs s > d");
  } else {
    need("set");
    need("N");
  }
  if (exp == "splitcheck" && cfg["set"]["kind"] != "disjoint_union")
    schema_error(source, index.line_of("/set/kind"), "splitcheck needs a disjoint_union set");
  if (exp == "zeroweight" && (!cfg.contains("weight") || cfg["weight"]["kind"] != "power_zero"))
    schema_error(source, index.line_of("/weight"), "zeroweight needs a power_zero weight");
  if (cfg.contains("N")) {
    const auto& ns = cfg["N"];
    for (std::size_t i = 1; i < ns.size(); ++i)
      if (ns[i].get<long long>() <= ns[i - 1].get<long long>())
        schema_error(source, index.line_of("/N/" + std::to_string(i)), "'N' must be strictly increasing");
  }
  return cfg;
}

Json load_run_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, file.string() + ": cannot read config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), file.string());
}

namespace {

Point vector_point(const Json& v) {
  std::vector<double> xs = v.get<std::vector<double>>();
  return Point::from_span(xs);
}

double get_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

}  // namespace

EmbeddedSet parse_set(const Json& node) {
  const std::string kind = node.at("kind");
  if (kind == "circle") return EmbeddedSet::circle(get_or(node, "radius", 1.0));
  if (kind == "sphere2") return EmbeddedSet::sphere2(get_or(node, "radius", 1.0));
  if (kind == "arc") return EmbeddedSet::arc(get_or(node, "radius", 1.0), node.at("span").get<double>());
  if (kind == "interval") return EmbeddedSet::interval(get_or(node, "length", 1.0));
  if (kind == "cube")
    return EmbeddedSet::cube(get_or(node, "side", 1.0), node.at("dim").get<std::size_t>());
  if (kind == "flat_torus")
    return EmbeddedSet::flat_torus(get_or(node, "major", 1.0), get_or(node, "minor", std::sqrt(3.0) / 2.0));
  if (kind == "disjoint_union") {
    std::vector<EmbeddedSet::Placement> parts;
    for (const Json& p : node.at("parts")) {
      EmbeddedSet part = parse_set(p.at("set"));
      Point offset = p.contains("offset") ? vector_point(p["offset"]) : Point(part.ambient_dim());
      if (offset.dim != part.ambient_dim())
        throw Error(ErrorKind::InvalidArgument, "union offset has the wrong dimension for its part");
      parts.push_back({std::move(part), offset});
    }
    return EmbeddedSet::disjoint_union(parts);
  }
  throw Error(ErrorKind::UnsupportedKind, "unknown set kind '" + kind + "'");
}

WeightFn parse_weight(const Json& node, const EmbeddedSet& set, double s, int d) {
  const std::string kind = node.at("kind");
  if (kind == "unit") return unit_weight();
  if (kind == "density") {
    const ScalarField rho = named_density(node.at("density"), set, get_or(node, "amplitude", 0.0));
    return density_weight(rho, s, d, set);
  }
  if (kind == "power_zero") {
    const Point a = vector_point(node.at("a"));
    if (a.dim != set.ambient_dim())
      throw Error(ErrorKind::InvalidArgument, "zero location has the wrong dimension");
    return power_zero_weight(a, node.at("t").get<double>());
  }
  throw Error(ErrorKind::UnsupportedKind, "unknown weight kind '" + kind + "'");
}

}  // namespace riesz
