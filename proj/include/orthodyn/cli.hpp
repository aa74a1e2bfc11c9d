#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "fockoracle.hpp"
#include "observables.hpp"
#include "reduction.hpp"

namespace orthodyn::cli {

inline constexpr const char* kConfigSchema = "orthodyn-config/1";
inline constexpr const char* kTableSchema = "orthodyn-table/1";
inline constexpr const char* kErrorSchema = "orthodyn-error/1";

// A bad or missing config entry; `field` is "section.key" or "line N".
struct ConfigError : Error {
    std::string field;
    ConfigError(std::string what, std::string f) : Error(std::move(what)), field(std::move(f)) {}
};

// ---- config access ----

class Config {
public:
    explicit Config(boost::property_tree::ptree pt) : pt_(std::move(pt)) {
        auto s = pt_.get_optional<std::string>("schema");
        if (!s) throw ConfigError("missing schema key (expected " + std::string(kConfigSchema) + ")", "schema");
        if (*s != kConfigSchema) throw ConfigError("unsupported schema '" + *s + "'", "schema");
    }

    static Config from_file(const std::string& path) {
        boost::property_tree::ptree pt;
        try {
            boost::property_tree::read_ini(path, pt);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(e.message(), e.line() ? "line " + std::to_string(e.line()) : path);
        }
        return Config(std::move(pt));
    }

    static Config from_string(const std::string& text) {
        boost::property_tree::ptree pt;
        std::istringstream in(text);
        try {
            boost::property_tree::read_ini(in, pt);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(e.message(), "line " + std::to_string(e.line()));
        }
        return Config(std::move(pt));
    }

    bool has(const std::string& key) const { return pt_.get_optional<std::string>(key).has_value(); }
    bool has_section(const std::string& s) const { return pt_.get_child_optional(s).has_value(); }

    std::string str(const std::string& key) const {
        auto v = pt_.get_optional<std::string>(key);
        if (!v) throw ConfigError("missing field", key);
        return boost::trim_copy(*v);
    }
    std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

    double num(const std::string& key) const { return parse_double(str(key), key); }
    double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

    long integer(const std::string& key) const {
        double v = num(key);
        if (v != std::floor(v)) throw ConfigError("expected an integer", key);
        return static_cast<long>(v);
    }
    long integer(const std::string& key, long def) const { return has(key) ? integer(key) : def; }

    cplx complex(const std::string& key, cplx def = 0.0) const {
        if (!has(key)) return def;
        auto parts = list(key);
        if (parts.size() == 1) return parse_double(parts[0], key);
        if (parts.size() == 2) return {parse_double(parts[0], key), parse_double(parts[1], key)};
        throw ConfigError("expected 're' or 're, im'", key);
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        std::string s = str(key);
        if (s.empty()) return out;
        boost::split(out, s, boost::is_any_of(","));
        for (auto& x : out) boost::trim(x);
        return out;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& x : list(key)) out.push_back(parse_double(x, key));
        return out;
    }

    static double parse_double(const std::string& s, const std::string& key) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'", key);
        return v;
    }

private:
    boost::property_tree::ptree pt_;
};

// ---- tables ----

using Cell = std::variant<std::monostate, double, std::string>;

struct Check {
    std::string name;
    double value{0}, tol{0};
    bool pass() const { return value <= tol; }
};

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    std::vector<Check> checks;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
};

enum class FloatStyle { Fixed17, Shortest };

inline std::string format_double(double v, FloatStyle style) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    if (style == FloatStyle::Shortest) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return {buf, p};
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string to_csv(const Table& t, FloatStyle style) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
    out += "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (auto d = std::get_if<double>(&row[i])) out += format_double(*d, style);
            else if (auto s = std::get_if<std::string>(&row[i])) out += csv_field(*s);
        }
        out += "\r\n";
    }
    return out;
}

inline nlohmann::ordered_json checks_json(const std::vector<Check>& cs) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& c : cs) a.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass()}});
    return a;
}

inline std::string to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["schema"] = kTableSchema;
    j["command"] = t.command;
    j["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (auto d = std::get_if<double>(&c)) r.push_back(*d);
            else if (auto s = std::get_if<std::string>(&c)) r.push_back(*s);
            else r.push_back(nullptr);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["meta"] = t.meta;
    j["checks"] = checks_json(t.checks);
    return j.dump(2) + "\n";
}

inline std::string gnuplot_script(const Table& t, const std::string& csv_path) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key autotitle columnheader\n"
       << "set xlabel '" << t.columns.at(0) << "'\n"
       << "plot for [i=2:" << t.columns.size() << "] '" << csv_path << "' using 1:i with lines\n";
    return os.str();
}

// ---- options shared by all commands ----

struct Options {
    std::size_t truncation{200};
    std::optional<double> tol;
    bool oracle{false};
};

inline double tolerance(const Config& cfg, const Options& opt, const std::string& key, double def) {
    return opt.tol ? *opt.tol : cfg.num("tolerances." + key, def);
}

// ---- building module inputs from a config ----

inline PearsonData family_from(const Config& cfg) {
    std::string kind = cfg.str("family.kind");
    if (kind == "hermite") return hermite(cfg.num("family.a1", -2), cfg.num("family.a0", 0), cfg.num("family.b0", 1));
    if (kind == "laguerre") {
        if (!cfg.has("family.a1")) return laguerre_canonical(cfg.num("family.mu"));
        return laguerre(cfg.num("family.a1"), cfg.num("family.a0"), cfg.num("family.b1"), cfg.num("family.b0", 0));
    }
    if (kind == "jacobi")
        return jacobi(cfg.num("family.a", -1), cfg.num("family.b", 1), cfg.num("family.mu"), cfg.num("family.nu"),
                      cfg.num("family.scale", 1));
    if (kind == "legendre") return legendre();
    if (kind == "strong_field_jacobi") return strong_field(Family::Jacobi, {.ja = cfg.num("family.a", -1), .jb = cfg.num("family.b", 1)});
    throw ConfigError("unknown family kind '" + kind + "'", "family.kind");
}

inline std::optional<double> normalization_from(const Config& cfg) {
    if (cfg.has("family.C")) return cfg.num("family.C");
    return std::nullopt;
}

inline MultiModeSystem multimode_from(const Config& cfg) {
    auto omega = cfg.numbers("multimode.omega");
    std::vector<int> l;
    for (double x : cfg.numbers("multimode.l")) {
        if (x != std::floor(x)) throw ConfigError("l must be integers", "multimode.l");
        l.push_back(static_cast<int>(x));
    }
    cplx g = cfg.complex("multimode.g", 1.0);
    std::function<double(const Occupation&)> h;
    std::string hk = cfg.str("multimode.h", "zero");
    if (hk == "linear") {
        // h = coeff * (sum_j n_j + offset)
        double c = cfg.num("multimode.h_coeff"), off = cfg.num("multimode.h_offset", 0);
        h = [c, off](const Occupation& n) {
            double s = off;
            for (auto x : n) s += static_cast<double>(x);
            return c * s;
        };
    } else if (hk != "zero") {
        throw ConfigError("h must be 'zero' or 'linear'", "multimode.h");
    }
    std::optional<RealMatrix> alpha;
    if (cfg.has("multimode.alpha0")) {
        RealMatrix a;
        for (std::size_t i = 0; i < l.size(); ++i) a.push_back(cfg.numbers("multimode.alpha" + std::to_string(i)));
        alpha = a;
    }
    if (omega.size() != l.size()) throw ConfigError("omega and l differ in length", "multimode.l");
    return make_system(omega, l, g, h, alpha);
}

inline Occupation start_from(const Config& cfg, std::size_t modes) {
    Occupation n;
    for (double x : cfg.numbers("multimode.start")) n.push_back(static_cast<long>(x));
    if (n.size() != modes) throw ConfigError("start occupation has the wrong length", "multimode.start");
    return n;
}

inline QuantumState state_from(const Config& cfg) {
    std::string kind = cfg.str("state.kind", "number");
    if (kind == "number") {
        long n = cfg.integer("state.n", 0);
        if (n < 0) throw ConfigError("n must be nonnegative", "state.n");
        return NumberState{static_cast<std::size_t>(n)};
    }
    if (kind == "gaussian") return GaussianCoherent{cfg.complex("state.zeta")};
    if (kind == "spectral") return SpectralCoherent{cfg.complex("state.z")};
    if (kind == "fock") {
        // coefficients as "re:im" or "re", comma separated
        std::vector<cplx> c;
        for (const auto& item : cfg.list("state.coeffs")) {
            auto colon = item.find(':');
            if (colon == std::string::npos) c.emplace_back(Config::parse_double(item, "state.coeffs"));
            else
                c.emplace_back(Config::parse_double(item.substr(0, colon), "state.coeffs"),
                               Config::parse_double(item.substr(colon + 1), "state.coeffs"));
        }
        return FockState{c};
    }
    throw ConfigError("unknown state kind '" + kind + "'", "state.kind");
}

inline std::vector<double> time_grid(const Config& cfg) {
    double t0 = cfg.num("time.t0", 0), t1 = cfg.num("time.t1", t0);
    long steps = cfg.integer("time.steps", 0);
    if (steps < 0) throw ConfigError("steps must be nonnegative", "time.steps");
    if (steps == 0) {
        if (t1 != t0) throw ConfigError("a single time point needs t1 = t0", "time.steps");
        return {t0};
    }
    if (!(t1 > t0)) throw ConfigError("time grid must be strictly increasing (t1 > t0)", "time.t1");
    std::vector<double> out;
    for (long k = 0; k <= steps; ++k) out.push_back(t0 + (t1 - t0) * static_cast<double>(k) / steps);
    return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> pairs_from(const Config& cfg, const std::string& key) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& item : cfg.list(key)) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("expected m:n pairs", key);
        double m = Config::parse_double(item.substr(0, colon), key), n = Config::parse_double(item.substr(colon + 1), key);
        if (m < 0 || n < 0 || m != std::floor(m) || n != std::floor(n)) throw ConfigError("indices must be nonnegative integers", key);
        out.emplace_back(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    }
    return out;
}

inline const char* type_name(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const ConstraintViolated*>(&e)) return "ConstraintViolated";
    if (dynamic_cast<const StripError*>(&e)) return "StripError";
    if (dynamic_cast<const Unsupported*>(&e)) return "Unsupported";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
    if (dynamic_cast<const Singular*>(&e)) return "Singular";
    if (dynamic_cast<const NoPseudoVacuum*>(&e)) return "NoPseudoVacuum";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    return "Error";
}

inline std::string error_report(const std::exception& e) {
    nlohmann::ordered_json j;
    j["schema"] = kErrorSchema;
    j["error"]["type"] = type_name(e);
    j["error"]["message"] = e.what();
    if (auto c = dynamic_cast<const ConfigError*>(&e)) j["error"]["where"] = c->field;
    if (auto c = dynamic_cast<const ConstraintViolated*>(&e)) j["error"]["where"] = c->where;
    return j.dump(2) + "\n";
}

inline std::string tolerance_report(const Table& t) {
    nlohmann::ordered_json j;
    j["schema"] = kErrorSchema;
    j["error"]["type"] = "ToleranceExceeded";
    j["error"]["message"] = "one or more requested tolerances were not met";
    j["error"]["checks"] = checks_json(t.checks);
    return j.dump(2) + "\n";
}

// ---- spectrum ----

inline Table cmd_spectrum(const Config& cfg, const Options&) {
    auto pd = family_from(cfg);
    auto sm = SpectralMeasure{pd, normalization_from(cfg).value_or(default_normalization(pd))};
    double lo = std::isinf(pd.lo) ? pd.hi - 10 : pd.lo, hi = std::isinf(pd.hi) ? lo + 10 : pd.hi;
    if (pd.family == Family::Hermite) {
        double c = -pd.a0 / pd.a1, w = 4 * std::sqrt(-pd.b0 / pd.a1);
        lo = c - w;
        hi = c + w;
    }
    double w0 = cfg.num("spectrum.w0", lo), w1 = cfg.num("spectrum.w1", hi);
    long points = cfg.integer("spectrum.points", 101);
    long K = cfg.integer("spectrum.moments", 6);
    if (points < 2 || !(w1 > w0)) throw ConfigError("need points >= 2 and w1 > w0", "spectrum.points");
    if (K < 0) throw ConfigError("moments must be nonnegative", "spectrum.moments");

    Table t;
    t.command = "spectrum";
    t.columns = {"w [energy]", "rho [1/energy]", "k", "moment_k [energy^k]"};
    auto moments = nlohmann::ordered_json::array();
    std::vector<double> mom;
    for (long k = 0; k <= K; ++k) {
        mom.push_back(moment(sm, static_cast<unsigned>(k)));
        moments.push_back(mom.back());
    }
    for (long i = 0; i < std::max<long>(points, K + 1); ++i) {
        std::vector<Cell> row(4);
        if (i < points) {
            double w = w0 + (w1 - w0) * static_cast<double>(i) / (points - 1);
            row[0] = w;
            row[1] = sm.density(w);
        }
        if (i <= K) {
            row[2] = static_cast<double>(i);
            row[3] = mom[i];
        }
        t.rows.push_back(std::move(row));
    }
    t.meta["family"] = family_name(pd.family);
    t.meta["C"] = sm.C;
    t.meta["moments"] = moments;
    return t;
}

// ---- propagate ----

inline Table cmd_propagate(const Config& cfg, const Options& opt) {
    PropagatorContext ctx(family_from(cfg), normalization_from(cfg));
    auto grid = time_grid(cfg);
    auto pairs = pairs_from(cfg, "propagate.pairs");
    std::vector<std::size_t> unit_n;
    if (cfg.has("propagate.unitarity")) {
        for (double x : cfg.numbers("propagate.unitarity")) unit_n.push_back(static_cast<std::size_t>(x));
    }
    double y = cfg.num("propagate.y", 0.0);
    if (opt.oracle && y != 0.0) throw Unsupported("propagate: the oracle compares real times only (y = 0)");
    double tol_oracle = tolerance(cfg, opt, "oracle", 1e-8), tol_unit = tolerance(cfg, opt, "unitarity", 1e-8);

    Table t;
    t.command = "propagate";
    t.columns = {"t [1/energy]"};
    for (auto [m, n] : pairs) {
        std::string s = std::to_string(m) + "_" + std::to_string(n);
        t.columns.push_back("re_sigma_" + s + " [interaction]");
        t.columns.push_back("im_sigma_" + s + " [interaction]");
    }
    for (auto n : unit_n) t.columns.push_back("unitarity_" + std::to_string(n));
    std::optional<TruncatedOperator> op;
    if (opt.oracle) {
        op = truncated_h(ctx.js, std::min(opt.truncation, ctx.js.dim));
        for (auto [m, n] : pairs) {
            std::string s = std::to_string(m) + "_" + std::to_string(n);
            t.columns.push_back("re_oracle_" + s + " [interaction]");
            t.columns.push_back("im_oracle_" + s + " [interaction]");
        }
        t.columns.push_back("max_deviation");
    }
    double worst_oracle = 0.0, worst_unit = 0.0;
    for (double time : grid) {
        std::vector<Cell> row{time};
        cplx z(time, y);
        std::vector<cplx> vals;
        for (auto [m, n] : pairs) {
            vals.push_back(sigma_mn(ctx, m, n, z));
            row.emplace_back(vals.back().real());
            row.emplace_back(vals.back().imag());
        }
        for (auto n : unit_n) {
            std::vector<cplx> e(n + 1, 0.0);
            e[n] = 1.0;
            double s = 0.0;
            for (auto c : evolve(ctx, e, time)) s += std::norm(c);
            row.emplace_back(s);
            worst_unit = std::max(worst_unit, std::abs(s - 1));
        }
        if (op) {
            double dev = 0.0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                auto [m, n] = pairs[i];
                if (n >= op->dim || m >= op->dim) throw DomainError("propagate: pair beyond the oracle truncation");
                std::vector<cplx> e(n + 1, 0.0);
                e[n] = 1.0;
                cplx o = expm_evolve(*op, e, time)[m];
                row.emplace_back(o.real());
                row.emplace_back(o.imag());
                dev = std::max(dev, std::abs(o - vals[i]));
            }
            row.emplace_back(dev);
            worst_oracle = std::max(worst_oracle, dev);
        }
        t.rows.push_back(std::move(row));
    }
    if (!unit_n.empty()) t.checks.push_back({"unitarity", worst_unit, tol_unit});
    if (op) t.checks.push_back({"oracle_max_deviation", worst_oracle, tol_oracle});
    t.meta["family"] = family_name(ctx.pd.family);
    t.meta["picture"] = "interaction";
    if (op) t.meta["truncation"] = op->dim;
    return t;
}

// ---- expectation values ----

// Evolved ladder states from a polynomial family or from a reduced multimode sector.
struct Engine {
    std::optional<PropagatorContext> ctx;
    std::optional<LadderEvolver> ev;
    JacobiSystem js;
    std::optional<MultiModeSystem> sys;
    std::optional<Sector> sector;
    std::string label;

    std::vector<cplx> state(const QuantumState& s, double t, unsigned power) const {
        if (ctx) return state_at(*ctx, s, t, power);
        return state_at(*ev, s, t);
    }
};

inline Engine engine_from(const Config& cfg) {
    Engine e;
    if (cfg.has_section("multimode")) {
        auto sys = multimode_from(cfg);
        auto sector = find_pseudo_vacuum(sys, start_from(cfg, sys.modes()));
        e.js = reduce(sys, sector);
        auto c = classify_ladder(e.js);
        e.label = c.describe(e.js.dim);
        if (c.pd) {
            e.ctx.emplace(*c.pd);
            e.ctx->js.gamma0 = e.js.gamma0;
        } else {
            e.ev.emplace(e.js);
        }
        e.sys = sys;
        e.sector = sector;
    } else {
        e.ctx.emplace(family_from(cfg), normalization_from(cfg));
        e.ctx->js.gamma0 = cfg.num("expect.gamma0", 0.0);
        e.js = e.ctx->js;
        e.label = family_name(e.ctx->pd.family);
    }
    return e;
}

struct Observable {
    std::string kind;
    unsigned p{0}, q{0};
};

inline std::vector<Observable> observables_from(const Config& cfg) {
    std::vector<Observable> out;
    for (const auto& item : cfg.list("expect.observables")) {
        std::vector<std::string> parts;
        boost::split(parts, item, boost::is_any_of(":"));
        Observable o{parts[0]};
        auto idx = [&](std::size_t i) {
            if (parts.size() <= i) throw ConfigError("observable '" + item + "' needs more indices", "expect.observables");
            double v = Config::parse_double(parts[i], "expect.observables");
            if (v < 0 || v != std::floor(v)) throw ConfigError("indices must be nonnegative integers", "expect.observables");
            return static_cast<unsigned>(v);
        };
        if (o.kind == "number" || o.kind == "alpha" || o.kind == "modulation") o.p = idx(1);
        else if (o.kind == "correlation" || o.kind == "cluster") {
            o.p = idx(1);
            o.q = idx(2);
        } else if (o.kind != "energy" && o.kind != "total_energy" && o.kind != "alpha_dispersion")
            throw ConfigError("unknown observable '" + o.kind + "'", "expect.observables");
        if ((o.kind == "number" || o.kind == "alpha") && o.p == 0)
            throw ConfigError("power must be positive", "expect.observables");
        out.push_back(o);
    }
    return out;
}

inline Table cmd_expect(const Config& cfg, const Options& opt) {
    auto eng = engine_from(cfg);
    auto state = state_from(cfg);
    auto obs = observables_from(cfg);
    auto grid = time_grid(cfg);
    std::string pic_s = cfg.str("expect.picture", "interaction");
    if (pic_s != "interaction" && pic_s != "full") throw ConfigError("picture must be interaction or full", "expect.picture");
    Picture pic = pic_s == "full" ? Picture::Full : Picture::Interaction;
    const bool spectral = std::holds_alternative<SpectralCoherent>(state);
    const std::string P = std::string(" [") + picture_name(pic) + "]", IP = " [interaction]";

    Table t;
    t.command = "expect";
    t.columns = {"t [1/energy]"};
    unsigned power = 4;
    for (const auto& o : obs) {
        std::string a = std::to_string(o.p), b = std::to_string(o.q);
        if (o.kind == "energy") t.columns.push_back("H_I [energy]" + IP);
        else if (o.kind == "total_energy") t.columns.push_back("H [energy] [full]");
        else if (o.kind == "number") t.columns.push_back("N^" + a + IP);
        else if (o.kind == "modulation") t.columns.push_back("n_" + a + IP);
        else if (o.kind == "correlation" || o.kind == "cluster") {
            if (o.kind == "correlation" && pic == Picture::Full)
                throw Unsupported("expect: correlation is available in the interaction picture only");
            std::string n = (o.kind == "correlation" ? "a*^" : "A*^") + a + (o.kind == "correlation" ? " a^" : " A^") + b;
            t.columns.push_back("re " + n + (o.kind == "cluster" ? P : IP));
            t.columns.push_back("im " + n + (o.kind == "cluster" ? P : IP));
        } else if (o.kind == "alpha" || o.kind == "alpha_dispersion") {
            if (!eng.ctx) throw Unsupported("expect: alpha moments need a polynomial family (reduced ladder is " + eng.label + ")");
            std::string n = o.kind == "alpha" ? "alpha^" + a : "dispersion alpha";
            t.columns.push_back("re " + n + IP);
            t.columns.push_back("im " + n + IP);
        }
        if (o.kind == "modulation" && (!eng.sys || o.p >= eng.sys->modes()))
            throw Unsupported("expect: modulation needs a multimode config and a valid mode index");
        if (o.kind == "total_energy" && !eng.ctx && spectral) throw Unsupported("expect: spectral state needs a polynomial family");
        power = std::max(power, 2 * (o.p + o.q) + 2);
    }
    if (spectral && !eng.ctx)
        throw Unsupported("expect: spectral coherent states need a polynomial family (reduced ladder is " + eng.label + ")");

    std::optional<TruncatedOperator> op;
    std::vector<cplx> start;
    if (opt.oracle) {
        op = truncated_h(eng.js, std::min(opt.truncation, eng.js.dim));
        start = eng.state(state, 0.0, power);
        if (start.size() > op->dim) start.resize(op->dim);
        t.columns.push_back("oracle_max_deviation");
    }
    auto energy0 = [&] {
        if (eng.ctx) return h_expectation(*eng.ctx, state);
        return ladder_energy(eng.js, eng.state(state, 0.0, power));
    };
    double worst = 0.0;
    for (double time : grid) {
        auto v = eng.state(state, time, power);
        std::vector<cplx> x;
        if (op) x = expm_evolve(*op, start, time);
        double dev = 0.0;
        auto cmp = [&](cplx a, cplx b) { dev = std::max(dev, std::abs(a - b) / std::max(1.0, std::abs(b))); };
        std::vector<Cell> row{time};
        for (const auto& o : obs) {
            if (o.kind == "energy") {
                double e = energy0();
                row.emplace_back(e);
                if (op) cmp(e, ladder_energy(eng.js, x));
            } else if (o.kind == "total_energy") {
                double e = eng.js.gamma0 * number_moment_of(v, 1) + energy0();
                row.emplace_back(e);
                if (op) cmp(e, eng.js.gamma0 * number_moment_of(x, 1) + ladder_energy(eng.js, x));
            } else if (o.kind == "number") {
                double n = number_moment_of(v, o.p);
                row.emplace_back(n);
                if (op) cmp(n, number_moment_of(x, o.p));
            } else if (o.kind == "modulation") {
                double n = modulation_mean(*eng.sys, *eng.sector, number_moment_of(v, 1), o.p);
                row.emplace_back(n);
                if (op) cmp(n, modulation_mean(*eng.sys, *eng.sector, number_moment_of(x, 1), o.p));
            } else if (o.kind == "correlation") {
                cplx c = correlation_of(v, o.p, o.q);
                row.emplace_back(c.real());
                row.emplace_back(c.imag());
                if (op) cmp(c, correlation_of(x, o.p, o.q));
            } else if (o.kind == "cluster") {
                cplx f = pic == Picture::Full ? std::polar(1.0, -eng.js.gamma0 * (double(o.q) - o.p) * time) : cplx(1.0);
                cplx c = cluster_of(eng.js, v, o.p, o.q) * f;
                row.emplace_back(c.real());
                row.emplace_back(c.imag());
                if (op) cmp(c, cluster_of(eng.js, x, o.p, o.q) * f);
            } else if (o.kind == "alpha") {
                cplx c = alpha_moment(*eng.ctx, state, o.p, time);
                row.emplace_back(c.real());
                row.emplace_back(c.imag());
            } else if (o.kind == "alpha_dispersion") {
                cplx c = alpha_dispersion(*eng.ctx, state, time);
                row.emplace_back(c.real());
                row.emplace_back(c.imag());
            }
        }
        if (op) {
            row.emplace_back(dev);
            worst = std::max(worst, dev);
        }
        t.rows.push_back(std::move(row));
    }
    if (op) {
        t.checks.push_back({"oracle_max_deviation", worst, tolerance(cfg, opt, "oracle", 1e-7)});
        t.meta["truncation"] = op->dim;
    }
    t.meta["system"] = eng.label;
    t.meta["picture"] = picture_name(pic);
    t.meta["gamma0"] = eng.js.gamma0;
    return t;
}

// ---- reduce ----

inline Table cmd_reduce(const Config& cfg, const Options&) {
    auto sys = multimode_from(cfg);
    auto sector = find_pseudo_vacuum(sys, start_from(cfg, sys.modes()));
    auto js = reduce(sys, sector);
    auto cls = classify_ladder(js);
    long samples = cfg.integer("reduce.samples", 10);
    if (samples < 1) throw ConfigError("samples must be positive", "reduce.samples");

    auto occ = [](const Occupation& n) {
        std::string s;
        for (std::size_t i = 0; i < n.size(); ++i) s += (i ? " " : "") + std::to_string(n[i]);
        return s;
    };
    Table t;
    t.command = "reduce";
    t.columns = {"field", "value"};
    auto add = [&](std::string k, Cell v) { t.rows.push_back({std::move(k), std::move(v)}); };
    add("classification", cls.describe(js.dim));
    add("dim", js.infinite() ? std::string("inf") : std::to_string(js.dim));
    add("gamma0 [energy]", js.gamma0);
    add("pseudo_vacuum", occ(sector.pseudo_vacuum_occupation));
    add("lambda_0", sector.lambda00);
    for (std::size_t i = 0; i < sector.lambda_rest.size(); ++i) add("lambda_" + std::to_string(i + 1), sector.lambda_rest[i]);
    auto gam = gamma_coeffs(sys);
    for (std::size_t i = 0; i < gam.size(); ++i) add("gamma_" + std::to_string(i) + " [energy]", gam[i]);
    for (long n = 0; n < samples && static_cast<std::size_t>(n) < js.dim; ++n) {
        add("b(" + std::to_string(n) + ") [energy]", js.b(static_cast<std::size_t>(n)));
        add("h(" + std::to_string(n) + ") [energy]", js.h(static_cast<std::size_t>(n)));
        add("occupation(" + std::to_string(n) + ")", occ(step(sys.l, sector.pseudo_vacuum_occupation, n)));
    }
    t.meta["classification"] = cls.describe(js.dim);
    if (cls.family) t.meta["family"] = family_name(*cls.family);
    if (cls.family && *cls.family != Family::Hermite) t.meta["mu"] = cls.mu;
    t.meta["h_matches"] = cls.h_matches;
    return t;
}

// ---- amplifier ----

inline Table cmd_amplifier(const Config& cfg, const Options& opt) {
    cplx z0 = cfg.complex("amplifier.zeta0"), z1 = cfg.complex("amplifier.zeta1");
    double g = cfg.num("amplifier.g", 1.0);
    if (!(g > 0)) throw ConfigError("g must be positive", "amplifier.g");
    long cut = cfg.integer("amplifier.per_mode", 29);
    if (cut < 1) throw ConfigError("per_mode must be positive", "amplifier.per_mode");
    auto grid = time_grid(cfg);
    double tol = tolerance(cfg, opt, "amplifier_rel", 1e-3);

    // two-mode Fock box, coupling -i g a0 a1 + h.c.
    auto basis = box_basis(2, cut);
    auto sys = make_system({0, 0}, {1, 1}, cplx(0, -g));
    auto op = dense_operator(multimode_matrix(sys, {TermKind::HI}, basis));
    auto c0 = detail::gaussian_coefficients(z0), c1 = detail::gaussian_coefficients(z1);
    Eigen::VectorXcd v(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto n0 = static_cast<std::size_t>(basis[i][0]), n1 = static_cast<std::size_t>(basis[i][1]);
        v(i) = (n0 < c0.size() ? c0[n0] : 0.0) * (n1 < c1.size() ? c1[n1] : 0.0);
    }
    Table t;
    t.command = "amplifier";
    t.columns = {"t [1/energy]", "n0 closed form [interaction]", "n0 oracle [interaction]", "relative deviation"};
    double worst = 0.0;
    for (double time : grid) {
        auto x = expm_evolve(op, v, time);
        double ref = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i) ref += basis[i][0] * std::norm(x(i));
        double cf = amplifier_mean_photon(z0, z1, g, time);
        double rel = std::abs(cf - ref) / std::max(ref, 1e-300);
        if (cf == ref) rel = 0.0;
        worst = std::max(worst, rel);
        t.rows.push_back({time, cf, ref, rel});
    }
    t.checks.push_back({"amplifier_relative_deviation", worst, tol});
    t.meta["per_mode"] = cut + 1;
    return t;
}

inline Table run(const std::string& command, const Config& cfg, const Options& opt) {
    if (command == "spectrum") return cmd_spectrum(cfg, opt);
    if (command == "propagate") return cmd_propagate(cfg, opt);
    if (command == "expect") return cmd_expect(cfg, opt);
    if (command == "reduce") return cmd_reduce(cfg, opt);
    if (command == "amplifier") return cmd_amplifier(cfg, opt);
    throw ConfigError("unknown command '" + command + "'", "command");
}

}  // namespace orthodyn::cli
