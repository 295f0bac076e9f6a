#include "fracstokes/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fracstokes/errors.hpp"

namespace fracstokes {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      if (doc.section_lines_.count(section)) {
        throw ConfigError("duplicate section [" + section + "]", line_no);
      }
      doc.section_lines_[section] = line_no;
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    if (section.empty()) throw ConfigError("key outside of any [section]", line_no);
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    auto& entries = doc.sections_[section];
    if (entries.count(key)) throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
    entries[key] = Entry{value, line_no};
  }
  return doc;
}

bool IniDocument::has_section(const std::string& section) const { return sections_.count(section) > 0; }

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

int IniDocument::section_line(const std::string& section) const {
  const auto it = section_lines_.find(section);
  return it == section_lines_.end() ? 0 : it->second;
}

namespace {

struct Reader {
  const IniDocument& doc;
  std::string section;

  [[noreturn]] void fail(const IniDocument::Entry& e, const std::string& key, const std::string& msg) const {
    throw ConfigError("[" + section + "] " + key + ": " + msg, e.line);
  }

  double number(const IniDocument::Entry& e, const std::string& key) const {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    if (b != end && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(e, key, "expected a finite number, got '" + e.value + "'");
    }
    return v;
  }

  long long integer(const IniDocument::Entry& e, const std::string& key) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
      fail(e, key, "expected an integer, got '" + e.value + "'");
    }
    return v;
  }

  bool boolean(const IniDocument::Entry& e, const std::string& key) const {
    const auto v = lower(e.value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(e, key, "expected true or false, got '" + e.value + "'");
  }

  std::vector<std::string> words(const IniDocument::Entry& e) const {
    std::string s = e.value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
  }

  std::vector<double> numbers(const IniDocument::Entry& e, const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : words(e)) out.push_back(number(IniDocument::Entry{w, e.line}, key));
    if (out.empty()) fail(e, key, "expected a list of numbers");
    return out;
  }

  const IniDocument::Entry* get(const std::string& key) const { return doc.find(section, key); }

  template <typename F>
  void with(const std::string& key, F&& f) const {
    if (const auto* e = get(key)) f(*e);
  }

  void real(const std::string& key, double& out, const std::function<bool(double)>& ok,
            const char* requirement) const {
    with(key, [&](const IniDocument::Entry& e) {
      const double v = number(e, key);
      if (!ok(v)) fail(e, key, std::string("must be ") + requirement + ", got " + e.value);
      out = v;
    });
  }

  void whole(const std::string& key, int& out, long long lo, long long hi, const char* requirement) const {
    with(key, [&](const IniDocument::Entry& e) {
      const long long v = integer(e, key);
      if (v < lo || v > hi) fail(e, key, std::string("must be ") + requirement + ", got " + e.value);
      out = static_cast<int>(v);
    });
  }

  void flag(const std::string& key, bool& out) const {
    with(key, [&](const IniDocument::Entry& e) { out = boolean(e, key); });
  }
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"ndim", "points", "half_width"}},
      {"time", {"t_end", "steps"}},
      {"equation",
       {"alpha", "beta", "coefficient", "coefficient1", "coefficient2", "sigma", "sigma1", "sigma2", "rho",
        "rho1", "rho2", "p", "q"}},
      {"initial",
       {"type", "amplitude", "width", "center", "file", "v_type", "v_amplitude", "v_width", "v_center",
        "v_file"}},
      {"solver",
       {"picard_tol", "max_iters", "blowup_threshold", "nonneg_clamp", "window_nodes", "divergence_floor"}},
      {"sweep",
       {"p_min", "p_max", "p_step", "amplitudes", "horizon", "steps", "budget_s", "seed", "width",
        "growth_factor", "center_jitter", "boundary_width", "refine", "record_timings", "max_iters"}},
      {"output", {"dir", "formats", "checkpoint_every"}},
  };
  return keys;
}

auto positive = [](double v) { return v > 0.0; };
auto nonnegative = [](double v) { return v >= 0.0; };
auto above_minus_one = [](double v) { return v > -1.0; };
auto unit_order = [](double v) { return v > 0.0 && v <= 1.0; };

void read_initial(const Reader& r, const std::string& prefix, InitialSpec& spec) {
  r.with(prefix + "type", [&](const IniDocument::Entry& e) {
    const auto v = lower(e.value);
    if (v == "gaussian") {
      spec.kind = InitialSpec::Kind::Gaussian;
    } else if (v == "file") {
      spec.kind = InitialSpec::Kind::File;
    } else if (v == "zero") {
      spec.kind = InitialSpec::Kind::Zero;
    } else {
      r.fail(e, prefix + "type", "expected gaussian, file or zero, got '" + e.value + "'");
    }
  });
  r.real(prefix + "amplitude", spec.amplitude, nonnegative, ">= 0");
  r.real(prefix + "width", spec.width, positive, "> 0");
  r.with(prefix + "center", [&](const IniDocument::Entry& e) {
    const auto c = r.numbers(e, prefix + "center");
    if (c.size() > 3) r.fail(e, prefix + "center", "at most 3 coordinates");
    spec.center = {0.0, 0.0, 0.0};
    std::copy(c.begin(), c.end(), spec.center.begin());
  });
  r.with(prefix + "file", [&](const IniDocument::Entry& e) { spec.file = e.value; });
  if (spec.kind == InitialSpec::Kind::File && spec.file.empty()) {
    const auto* e = r.get(prefix + "type");
    r.fail(*e, prefix + "type", "type = file requires " + prefix + "file");
  }
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const GridSpec& RunConfig::require_grid() const {
  if (!grid) throw ConfigError("missing [grid] section");
  return *grid;
}

SolveConfig RunConfig::solve_config() const {
  SolveConfig c;
  c.time = TimeGrid(t_end, steps);
  c.picard_tol = picard_tol;
  c.picard_max_iters = max_iters;
  c.blowup_threshold = blowup_threshold;
  c.nonneg_clamp = nonneg_clamp;
  c.window_nodes = window_nodes;
  c.divergence_floor = divergence_floor;
  return c;
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig c;
  c.p_values = p_grid(p_min, p_max, p_step);
  c.amplitudes = amplitudes;
  std::sort(c.amplitudes.begin(), c.amplitudes.end());
  c.grid = require_grid();
  c.alpha = alpha;
  c.sigma = source_u.sigma;
  c.rho = source_u.rho;
  c.horizon = horizon > 0.0 ? horizon : t_end;
  c.steps = sweep_steps > 0 ? sweep_steps : steps;
  c.width = sweep_width;
  c.growth_factor = growth_factor;
  c.picard_tol = picard_tol;
  c.picard_max_iters = picard_max_iters_sweep;
  c.nonneg_clamp = true;
  c.seed = seed;
  c.center_jitter = center_jitter;
  c.boundary_width = boundary_width;
  c.refine = refine;
  c.budget_s = budget_s;
  c.record_timings = record_timings;
  return c;
}

RunConfig parse_run_config(const std::string& text) {
  const auto doc = IniDocument::parse(text);
  for (const auto& [section, entries] : doc.sections()) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      throw ConfigError("unknown section [" + section + "]", doc.section_line(section));
    }
    for (const auto& [key, entry] : entries) {
      if (!known->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]", entry.line);
    }
  }

  RunConfig cfg;
  if (doc.has_section("grid")) {
    Reader r{doc, "grid"};
    GridSpec g{1, 64, 1.0};
    r.whole("ndim", g.ndim, 1, 3, "1, 2 or 3");
    r.with("points", [&](const IniDocument::Entry& e) {
      const long long v = r.integer(e, "points");
      if (v < 8 || v > (1 << 20) || (v & (v - 1)) != 0) r.fail(e, "points", "must be a power of two >= 8");
      g.points = static_cast<int>(v);
    });
    r.real("half_width", g.half_width, positive, "> 0");
    cfg.grid = g;
  }
  {
    Reader r{doc, "time"};
    r.real("t_end", cfg.t_end, nonnegative, ">= 0");
    r.whole("steps", cfg.steps, 1, 10'000'000, ">= 1");
  }
  {
    Reader r{doc, "equation"};
    r.real("alpha", cfg.alpha, unit_order, "in (0, 1]");
    if (r.get("beta")) {
      double b = 1.0;
      r.real("beta", b, unit_order, "in (0, 1]");
      cfg.beta = b;
    }
    for (const char* k : {"coefficient", "coefficient1"}) r.real(k, cfg.source_u.coefficient, nonnegative, ">= 0");
    for (const char* k : {"sigma", "sigma1"}) r.real(k, cfg.source_u.sigma, above_minus_one, "> -1");
    for (const char* k : {"rho", "rho1"}) r.real(k, cfg.source_u.rho, nonnegative, ">= 0");
    r.real("p", cfg.source_u.p, [](double v) { return v >= 1.0; }, ">= 1");
    cfg.source_v = cfg.source_u;
    r.real("coefficient2", cfg.source_v.coefficient, nonnegative, ">= 0");
    r.real("sigma2", cfg.source_v.sigma, above_minus_one, "> -1");
    r.real("rho2", cfg.source_v.rho, nonnegative, ">= 0");
    cfg.source_v.p = cfg.source_u.p;
    r.real("q", cfg.source_v.p, [](double v) { return v >= 1.0; }, ">= 1");
  }
  {
    Reader r{doc, "initial"};
    read_initial(r, "", cfg.initial_u);
    cfg.initial_v = cfg.initial_u;
    for (const char* k : {"v_type", "v_amplitude", "v_width", "v_center", "v_file"}) {
      if (r.get(k)) cfg.has_initial_v = true;
    }
    if (cfg.has_initial_v) read_initial(r, "v_", cfg.initial_v);
    if (cfg.grid) {
      for (const auto* spec : {&cfg.initial_u, &cfg.initial_v}) {
        if (spec->kind == InitialSpec::Kind::Gaussian && spec->width > cfg.grid->half_width / 8.0) {
          const auto* e = r.get(spec == &cfg.initial_u ? "width" : "v_width");
          if (!e) e = r.get("width");
          throw ConfigError("[initial] width must not exceed half_width/8", e ? e->line : doc.section_line("initial"));
        }
      }
    }
  }
  {
    Reader r{doc, "solver"};
    r.real("picard_tol", cfg.picard_tol, positive, "> 0");
    r.whole("max_iters", cfg.max_iters, 1, 1'000'000, ">= 1");
    r.real("blowup_threshold", cfg.blowup_threshold, positive, "> 0");
    r.flag("nonneg_clamp", cfg.nonneg_clamp);
    r.whole("window_nodes", cfg.window_nodes, 0, 10'000'000, ">= 0");
    r.real("divergence_floor", cfg.divergence_floor, positive, "> 0");
  }
  if (doc.has_section("sweep")) {
    cfg.has_sweep = true;
    Reader r{doc, "sweep"};
    r.real("p_min", cfg.p_min, [](double v) { return v >= 1.0; }, ">= 1");
    r.real("p_max", cfg.p_max, [](double v) { return v >= 1.0; }, ">= 1");
    r.real("p_step", cfg.p_step, positive, "> 0");
    r.with("amplitudes", [&](const IniDocument::Entry& e) {
      cfg.amplitudes = r.numbers(e, "amplitudes");
      for (double a : cfg.amplitudes) {
        if (!(a > 0.0)) r.fail(e, "amplitudes", "every amplitude must be > 0");
      }
      auto sorted = cfg.amplitudes;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        r.fail(e, "amplitudes", "amplitudes must be distinct");
      }
    });
    r.real("horizon", cfg.horizon, positive, "> 0");
    r.whole("steps", cfg.sweep_steps, 1, 10'000'000, ">= 1");
    r.real("budget_s", cfg.budget_s, nonnegative, ">= 0");
    r.with("seed", [&](const IniDocument::Entry& e) {
      const long long v = r.integer(e, "seed");
      if (v < 0) r.fail(e, "seed", "must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(v);
    });
    r.real("width", cfg.sweep_width, positive, "> 0");
    r.real("growth_factor", cfg.growth_factor, [](double v) { return v > 1.0; }, "> 1");
    r.real("center_jitter", cfg.center_jitter, nonnegative, ">= 0");
    r.real("boundary_width", cfg.boundary_width, positive, "> 0");
    r.flag("refine", cfg.refine);
    r.flag("record_timings", cfg.record_timings);
    r.whole("max_iters", cfg.picard_max_iters_sweep, 1, 1'000'000, ">= 1");
    if (cfg.p_max < cfg.p_min) {
      const auto* e = r.get("p_max");
      throw ConfigError("[sweep] p_max must be >= p_min", e ? e->line : doc.section_line("sweep"));
    }
    if (cfg.grid && cfg.sweep_width > cfg.grid->half_width / 8.0) {
      throw ConfigError("[sweep] width must not exceed half_width/8", r.get("width")->line);
    }
  }
  {
    Reader r{doc, "output"};
    r.with("dir", [&](const IniDocument::Entry& e) { cfg.output_dir = e.value; });
    r.with("formats", [&](const IniDocument::Entry& e) {
      cfg.formats.clear();
      for (const auto& w : r.words(e)) {
        const auto f = lower(w);
        if (f != "frdf" && f != "csv" && f != "jsonl" && f != "json") {
          r.fail(e, "formats", "unknown format '" + w + "' (frdf, csv, jsonl, json)");
        }
        cfg.formats.push_back(f);
      }
    });
    r.whole("checkpoint_every", cfg.checkpoint_every, 0, 10'000'000, ">= 0");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace fracstokes
