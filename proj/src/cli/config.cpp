#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "diamag/cli.hpp"

namespace diamag::cli {

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (!std::isfinite(v)) fail("value is not finite");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad expression '" + std::string(text_) + "': " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  double expression() {
    double v = term();
    for (;;) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  double primary() {
    if (accept('(')) {
      const double v = expression();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (accept_word("pi")) return kPi;
    if (accept_word("sqrt")) {
      if (!accept('(')) fail("sqrt needs '('");
      const double v = expression();
      if (!accept(')')) fail("missing ')'");
      if (v < 0.0) fail("sqrt of a negative number");
      return std::sqrt(v);
    }
    skip_space();
    double v = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail(pos_ < text_.size() ? "expected a number" : "unexpected end");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"mode", "name", "damping"}},
      {"grid", {"omega_min", "omega_max", "n_points", "spacing"}},
      {"transitions", {"transition"}},
      {"box", {"lx", "ly", "lz", "mass", "charge", "density", "gamma", "n_max"}},
      {"polariton", {"k_min", "k_max", "n_k", "spacing", "gamma_scale"}},
      {"output", {"dir"}},
      {"tolerances",
       {"reflection", "consistency", "sum_rule", "mu_infinity", "static_identity", "kk_roundtrip",
        "time_domain", "trk_diagonal", "optical_sum_rule"}},
  };
  return s;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source_ + ": " + what); }

  double number(const Entry& e) const {
    try {
      return evaluate_expression(e.value);
    } catch (const std::invalid_argument& ex) {
      fail(e.line, ex.what());
    }
  }

  int integer(const Entry& e) const {
    const double v = number(e);
    if (v != std::round(v) || std::abs(v) > 1e9) fail(e.line, "expected an integer, got '" + e.value + "'");
    return static_cast<int>(v);
  }

  std::string source_;
};

bool parse_spacing(const Reader& r, const Entry& e) {
  if (e.value == "linear") return false;
  if (e.value == "log") return true;
  r.fail(e.line, "spacing must be 'linear' or 'log', got '" + e.value + "'");
}

}  // namespace

double evaluate_expression(std::string_view text) { return ExpressionParser(text).parse(); }

void Tolerances::scale(double f) {
  if (!(f > 0.0)) throw std::invalid_argument("tolerance scale must be positive");
  for (double* t : {&reflection, &consistency, &sum_rule, &mu_infinity, &static_identity,
                    &kk_roundtrip, &time_domain, &trk_diagonal, &optical_sum_rule})
    *t *= f;
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  Reader r(source);
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::vector<Entry> transition_rows;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') r.fail(line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(current)) r.fail(line_no, "unknown section [" + current + "]");
      if (section_line.count(current)) r.fail(line_no, "duplicate section [" + current + "]");
      section_line[current] = line_no;
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) r.fail(line_no, "expected 'key = value'");
    if (current.empty()) r.fail(line_no, "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!schema().at(current).count(key)) r.fail(line_no, "unknown key '" + key + "' in [" + current + "]");
    if (value.empty()) r.fail(line_no, "empty value for '" + key + "'");
    if (current == "transitions") {
      transition_rows.push_back({value, line_no});
      continue;
    }
    if (sections[current].count(key)) r.fail(line_no, "duplicate key '" + key + "'");
    sections[current][key] = {value, line_no};
  }

  ScenarioConfig cfg;
  cfg.source = source;
  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  const Entry* mode = get("scenario", "mode");
  if (!mode) r.fail(section_line.count("scenario") ? section_line["scenario"] : 1, "missing [scenario] mode");
  if (mode->value == "phenomenological")
    cfg.mode = Mode::phenomenological;
  else if (mode->value == "box")
    cfg.mode = Mode::box;
  else if (mode->value == "vacuum")
    cfg.mode = Mode::vacuum;
  else
    r.fail(mode->line, "mode must be phenomenological, box or vacuum, got '" + mode->value + "'");
  if (const Entry* e = get("scenario", "name")) cfg.name = e->value;
  if (const Entry* e = get("scenario", "damping")) {
    if (e->value == "main")
      cfg.damping = DampingForm::main_text;
    else if (e->value == "appendix")
      cfg.damping = DampingForm::appendix;
    else
      r.fail(e->line, "damping must be 'main' or 'appendix'");
  }

  if (const Entry* e = get("grid", "omega_min")) cfg.grid.omega_min = r.number(*e);
  if (const Entry* e = get("grid", "omega_max")) cfg.grid.omega_max = r.number(*e);
  if (const Entry* e = get("grid", "n_points")) cfg.grid.n_points = r.integer(*e);
  if (const Entry* e = get("grid", "spacing")) cfg.grid.log_spacing = parse_spacing(r, *e);
  const int grid_line = section_line.count("grid") ? section_line["grid"] : 1;
  if (cfg.grid.n_points < 16) r.fail(grid_line, "grid n_points must be >= 16");
  if (!(cfg.grid.omega_min >= 0.0)) r.fail(grid_line, "grid omega_min must be >= 0");
  if (!(cfg.grid.omega_max > cfg.grid.omega_min)) r.fail(grid_line, "grid omega_max must exceed omega_min");
  if (cfg.grid.log_spacing && !(cfg.grid.omega_min > 0.0))
    r.fail(grid_line, "log spacing needs omega_min > 0");

  for (const Entry& row : transition_rows) {
    std::vector<double> v;
    std::string_view rest = row.value;
    for (;;) {
      const auto comma = rest.find(',');
      v.push_back(r.number({trim(rest.substr(0, comma)), row.line}));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (v.size() != 7)
      r.fail(row.line, "transition needs 7 values (omega_eg, gamma_e, d_edip, d_quad, d_mdip, "
                       "d_dia, d_dipoct), got " + std::to_string(v.size()));
    TransitionStrengths t;
    t.omega_eg = v[0];
    t.gamma_e = v[1];
    t.d_edip = v[2];
    t.d_quad = v[3];
    t.d_mdip = v[4];
    t.d_dia = v[5];
    t.d_dipoct = v[6];
    try {
      t.validate();
    } catch (const std::invalid_argument& ex) {
      r.fail(row.line, ex.what());
    }
    cfg.transitions.push_back(t);
  }

  if (sections.count("box")) {
    const int line = section_line["box"];
    BoxSpec b;
    auto required = [&](const char* key) -> const Entry& {
      const Entry* e = get("box", key);
      if (!e) r.fail(line, std::string("missing [box] ") + key);
      return *e;
    };
    b.lx = r.number(required("lx"));
    b.ly = r.number(required("ly"));
    b.lz = r.number(required("lz"));
    b.mass = r.number(required("mass"));
    b.gamma = r.number(required("gamma"));
    if (const Entry* e = get("box", "charge")) b.charge = r.number(*e);
    if (const Entry* e = get("box", "density")) b.density = r.number(*e);
    if (const Entry* e = get("box", "n_max")) b.n_max = r.integer(*e);
    if (!(b.lx > 0.0 && b.ly > 0.0 && b.lz > 0.0)) r.fail(line, "box lengths must be positive");
    if (!(b.mass > 0.0)) r.fail(line, "box mass must be positive");
    if (!(b.gamma >= 0.0)) r.fail(line, "box gamma must be non-negative");
    if (b.n_max < 2) r.fail(line, "box n_max must be >= 2");
    if (b.density) {
      const double wp2 = *b.density * b.charge * b.charge / b.mass;
      if (std::abs(wp2 - 1.0) > 1e-9)
        r.fail(get("box", "density")->line,
               "density * charge^2 / mass must equal 1 (frequencies are in omega_p), got " +
                   std::to_string(wp2));
    }
    cfg.box = b;
  }

  switch (cfg.mode) {
    case Mode::phenomenological:
      if (cfg.transitions.empty()) r.fail(mode->line, "phenomenological mode needs at least one transition");
      if (cfg.box) r.fail(section_line["box"], "[box] is not allowed in phenomenological mode");
      break;
    case Mode::box:
      if (!cfg.box) r.fail(mode->line, "box mode needs a [box] section");
      if (!cfg.transitions.empty()) r.fail(transition_rows.front().line, "transitions are not allowed in box mode");
      break;
    case Mode::vacuum:
      if (!cfg.transitions.empty()) r.fail(transition_rows.front().line, "vacuum mode takes no transitions");
      if (cfg.box) r.fail(section_line["box"], "[box] is not allowed in vacuum mode");
      break;
  }

  if (const Entry* e = get("polariton", "k_min")) cfg.polariton.k_min = r.number(*e);
  if (const Entry* e = get("polariton", "k_max")) cfg.polariton.k_max = r.number(*e);
  if (const Entry* e = get("polariton", "n_k")) cfg.polariton.n_k = r.integer(*e);
  if (const Entry* e = get("polariton", "spacing")) cfg.polariton.log_spacing = parse_spacing(r, *e);
  if (const Entry* e = get("polariton", "gamma_scale")) {
    const double g = r.number(*e);
    if (!(g >= 0.0 && g <= 1.0)) r.fail(e->line, "gamma_scale must lie in [0, 1]");
    cfg.polariton.gamma_scale = g;
  }
  const int pol_line = section_line.count("polariton") ? section_line["polariton"] : 1;
  if (!(cfg.polariton.k_min > 0.0 && cfg.polariton.k_max >= cfg.polariton.k_min))
    r.fail(pol_line, "polariton needs 0 < k_min <= k_max");
  if (cfg.polariton.n_k < 1) r.fail(pol_line, "polariton n_k must be >= 1");

  if (const Entry* e = get("output", "dir")) cfg.output_dir = e->value;

  auto tol = [&](const char* key, double& field) {
    if (const Entry* e = get("tolerances", key)) {
      field = r.number(*e);
      if (!(field > 0.0)) r.fail(e->line, std::string("tolerance ") + key + " must be positive");
    }
  };
  tol("reflection", cfg.tolerances.reflection);
  tol("consistency", cfg.tolerances.consistency);
  tol("sum_rule", cfg.tolerances.sum_rule);
  tol("mu_infinity", cfg.tolerances.mu_infinity);
  tol("static_identity", cfg.tolerances.static_identity);
  tol("kk_roundtrip", cfg.tolerances.kk_roundtrip);
  tol("time_domain", cfg.tolerances.time_domain);
  tol("trk_diagonal", cfg.tolerances.trk_diagonal);
  tol("optical_sum_rule", cfg.tolerances.optical_sum_rule);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

Eigen::ArrayXd frequency_grid(const GridSpec& g) {
  Eigen::ArrayXd w(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double s = static_cast<double>(i) / (g.n_points - 1);
    w[i] = g.log_spacing ? g.omega_min * std::pow(g.omega_max / g.omega_min, s)
                         : g.omega_min + s * (g.omega_max - g.omega_min);
  }
  return w;
}

std::vector<double> wavevector_grid(const PolaritonSpec& p) {
  std::vector<double> k(static_cast<std::size_t>(p.n_k));
  for (int i = 0; i < p.n_k; ++i) {
    const double s = p.n_k == 1 ? 0.0 : static_cast<double>(i) / (p.n_k - 1);
    k[static_cast<std::size_t>(i)] = p.log_spacing ? p.k_min * std::pow(p.k_max / p.k_min, s)
                                                   : p.k_min + s * (p.k_max - p.k_min);
  }
  return k;
}

}  // namespace diamag::cli
