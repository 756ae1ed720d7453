// Command implementations behind the `ringcorr` executable. Argument parsing
// lives in the executable; everything here works on a RunConfig and writes
// to streams, so it can be driven from tests as well.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "ringcorr/classical.hpp"
#include "ringcorr/errors.hpp"
#include "ringcorr/limits.hpp"
#include "ringcorr/model.hpp"
#include "ringcorr/quantum.hpp"
#include "ringcorr/selftest.hpp"
#include "ringcorr/theta.hpp"

namespace ringcorr::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitStatus : int {
    kExitOk = 0,
    kExitInvariantFailure = 1,
    kExitUsage = 2,
    kExitPartialFailure = 3,
};

enum class Command { Info, Scan, Kms, Limit, Mc, Selftest };
enum class Format { Csv, Json };

inline std::string_view to_string(Command c) {
    switch (c) {
    case Command::Info: return "info";
    case Command::Scan: return "scan";
    case Command::Kms: return "kms";
    case Command::Limit: return "limit";
    case Command::Mc: return "mc";
    case Command::Selftest: return "selftest";
    }
    return "?";
}

/// Invalid configuration; maps to exit status 2.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    Command command = Command::Info;
    double mass = 1.0;
    double radius = 1.0;
    double hbar = 1.0;
    std::optional<double> beta;
    std::optional<double> mean_energy;
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::optional<std::int64_t> points;
    SummationPolicy policy;
    Format format = Format::Csv;
    std::string out_path;  // empty: standard output
    std::uint64_t seed = 12345;
    std::int64_t samples = 1'000'000;
    int levels = 10;  // limit: hbar is halved this many times
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Scalar output cell. Doubles are written with 17 significant digits;
/// non-finite doubles become "nan"/"inf" in CSV and null in JSON.
using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;
};

struct Outcome {
    Table table;
    int status = kExitOk;
    std::string message;  // written to the error stream when non-empty
};

namespace detail {

inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_cell(const Cell& c) {
    struct V {
        std::string operator()(double v) const { return number(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"') q += '"';
                q += ch == '\n' ? ' ' : ch;
            }
            return q + '"';
        }
    };
    return std::visit(V{}, c);
}

inline std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (unsigned char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (ch < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += static_cast<char>(ch);
            }
        }
    }
    return out + '"';
}

inline std::string json_cell(const Cell& c) {
    struct V {
        std::string operator()(double v) const { return std::isfinite(v) ? number(v) : "null"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return json_string(s); }
    };
    return std::visit(V{}, c);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Splits [0, n) into contiguous chunks, one per worker. Each index is
/// handled exactly once, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 16)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline double nan() { return std::nan(""); }

} // namespace detail

/// Checks everything that does not need numerics. Throws usage_error.
inline void validate(const RunConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) throw usage_error(std::string(name) + " must be positive and finite");
    };
    positive(c.mass, "--mass");
    positive(c.radius, "--radius");
    positive(c.hbar, "--hbar");
    if (c.command != Command::Selftest) {
        if (c.beta.has_value() == c.mean_energy.has_value())
            throw usage_error("exactly one of --beta and --mean-energy is required");
        if (c.beta) positive(*c.beta, "--beta");
        if (c.mean_energy) positive(*c.mean_energy, "--mean-energy");
    }
    if (c.t_min && !std::isfinite(*c.t_min)) throw usage_error("--tmin must be finite");
    if (c.t_max && !std::isfinite(*c.t_max)) throw usage_error("--tmax must be finite");
    if (c.t_min && c.t_max && *c.t_min > *c.t_max) throw usage_error("--tmin must not exceed --tmax");
    if (c.points && *c.points < 1) throw usage_error("--points must be at least 1");
    if (!(c.policy.eps > 0.0 && c.policy.eps < 1.0)) throw usage_error("--eps must lie in (0, 1)");
    if (c.policy.max_terms < 1) throw usage_error("--max-terms must be at least 1");
    if (c.samples < 2) throw usage_error("--samples must be at least 2");
    if (c.levels < 2) throw usage_error("--levels must be at least 2");
}

/// Model parameters with beta resolved from --mean-energy when needed.
inline ModelParams resolve_params(const RunConfig& c) {
    const RingConstants k{c.mass, c.radius, c.hbar};
    if (c.beta) return ModelParams(k, *c.beta);
    try {
        return ModelParams(k, beta_from_energy(k, *c.mean_energy));
    } catch (const numeric_error& e) {
        throw usage_error(std::string("--mean-energy cannot be reached: ") + e.what());
    }
}

struct TimeRange {
    double t_min;
    double t_max;
    std::size_t points;
};

/// Per-command defaults: scan and kms cover one period, limit covers
/// [0, 3 sqrt(beta m) R], mc covers [0, 4 sqrt(beta m) R].
inline TimeRange resolve_range(const RunConfig& c, const ModelParams& p) {
    double hi = derive_scales(p).period;
    std::int64_t n = 201;
    const double thermal = std::sqrt(p.beta() * p.mass()) * p.radius();
    switch (c.command) {
    case Command::Kms: n = 64; break;
    case Command::Limit: hi = 3.0 * thermal; n = 61; break;
    case Command::Mc: hi = 4.0 * thermal; n = 21; break;
    default: break;
    }
    TimeRange r{c.t_min.value_or(0.0), c.t_max.value_or(hi), static_cast<std::size_t>(c.points.value_or(n))};
    if (r.t_min > r.t_max) throw usage_error("--tmin must not exceed --tmax");
    return r;
}

/// Canonical text of every setting that affects output (not the output path).
inline std::string canonical_config(const RunConfig& c) {
    using detail::number;
    std::string s = "command=" + std::string(to_string(c.command));
    s += ";mass=" + number(c.mass) + ";radius=" + number(c.radius) + ";hbar=" + number(c.hbar);
    s += ";beta=" + (c.beta ? number(*c.beta) : "-");
    s += ";mean_energy=" + (c.mean_energy ? number(*c.mean_energy) : "-");
    s += ";tmin=" + (c.t_min ? number(*c.t_min) : "-");
    s += ";tmax=" + (c.t_max ? number(*c.t_max) : "-");
    s += ";points=" + (c.points ? std::to_string(*c.points) : "-");
    s += ";eps=" + number(c.policy.eps) + ";max_terms=" + std::to_string(c.policy.max_terms);
    s += ";rep=" + std::string(ringcorr::to_string(c.policy.representation));
    s += ";format=" + std::string(c.format == Format::Csv ? "csv" : "json");
    s += ";seed=" + std::to_string(c.seed) + ";samples=" + std::to_string(c.samples);
    s += ";levels=" + std::to_string(c.levels);
    return s;
}

inline std::string config_hash(const RunConfig& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(canonical_config(c))));
    return buf;
}

inline Outcome cmd_info(const RunConfig& c) {
    const ModelParams p = resolve_params(c);
    const TimeScales s = derive_scales(p);
    Outcome o;
    o.table.columns = {"quantity", "value"};
    auto add = [&](const char* k, Cell v) { o.table.rows.push_back({std::string(k), std::move(v)}); };
    add("mass", p.mass());
    add("radius", p.radius());
    add("hbar", p.hbar());
    add("beta", p.beta());
    add("tau_a", s.tau_a);
    add("tau_b", s.tau_b);
    add("alpha", s.alpha);
    add("period", s.period);
    add("energy_scale", p.energy_scale());
    add("partition_sum", partition_sum(s.alpha, 1e-15, c.policy.max_terms));
    add("mean_energy", mean_energy(p, 1e-15, c.policy.max_terms));
    add("representation", std::string(ringcorr::to_string(select_representation(s.alpha, c.policy.representation))));
    return o;
}

inline Outcome cmd_scan(const RunConfig& c) {
    const ModelParams p = resolve_params(c);
    const TimeRange range = resolve_range(c, p);
    const std::vector<double> grid = linear_grid(range.t_min, range.t_max, range.points);

    std::vector<CorrelationPoint> pts(grid.size());
    std::optional<QuantumCorrelator> q;
    std::string f0_error;
    try {
        q.emplace(p, c.policy);
    } catch (const std::exception& e) {
        f0_error = std::string("F(0): ") + e.what();
    }
    detail::parallel_for(grid.size(), c.threads, [&](std::size_t i) {
        CorrelationPoint& pt = pts[i];
        pt.time = grid[i];
        if (!q) {
            pt.error = f0_error;
            return;
        }
        try {
            const CorrelatorValue a = q->c1(pt.time), b = q->c2(pt.time);
            pt.c1 = a.value;
            pt.c2 = b.value;
            pt.tail_bound = std::max(a.tail_bound, b.tail_bound);
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    });

    Outcome o;
    o.table.columns = {"t",     "re_c1",   "im_c1",     "re_c2", "im_c2", "c1_classical", "abs_c1_minus_classical",
                       "tail_bound", "status"};
    std::int64_t failed = 0;
    for (const CorrelationPoint& pt : pts) {
        const double cl = c1_classical(p, pt.time);
        if (pt.ok) {
            o.table.rows.push_back({pt.time, pt.c1.real(), pt.c1.imag(), pt.c2.real(), pt.c2.imag(), cl,
                                    std::abs(pt.c1 - cl), pt.tail_bound, std::string("ok")});
        } else {
            ++failed;
            const double n = detail::nan();
            o.table.rows.push_back({pt.time, n, n, n, n, cl, n, n, "error: " + pt.error});
        }
    }
    o.table.summary = {{"failed_points", failed}};
    if (failed > 0) {
        o.status = kExitPartialFailure;
        o.message = std::to_string(failed) + " of " + std::to_string(pts.size()) + " scan points failed";
    }
    return o;
}

/// KMS residuals on the grid; residuals above 1e-10 R^2 count as an
/// invariant failure.
inline Outcome cmd_kms(const RunConfig& c) {
    const ModelParams p = resolve_params(c);
    const TimeRange range = resolve_range(c, p);
    const std::vector<double> grid = linear_grid(range.t_min, range.t_max, range.points);
    const QuantumCorrelator q(p, c.policy);

    struct Row {
        KmsResiduals r;
        std::string error;
    };
    std::vector<Row> rows(grid.size());
    detail::parallel_for(grid.size(), c.threads, [&](std::size_t i) {
        try {
            rows[i].r = kms_residuals(q, grid[i]);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });

    Outcome o;
    o.table.columns = {"t", "r1", "r2", "tail_bound", "status"};
    double max_r1 = 0.0, max_r2 = 0.0;
    std::int64_t failed = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Row& row = rows[i];
        if (row.error.empty()) {
            max_r1 = std::max(max_r1, row.r.r1);
            max_r2 = std::max(max_r2, row.r.r2);
            o.table.rows.push_back({grid[i], row.r.r1, row.r.r2, row.r.tail_bound, std::string("ok")});
        } else {
            ++failed;
            const double n = detail::nan();
            o.table.rows.push_back({grid[i], n, n, n, "error: " + row.error});
        }
    }
    const double tolerance = 1e-10 * p.radius() * p.radius();
    o.table.summary = {{"max_r1", max_r1}, {"max_r2", max_r2}, {"tolerance", tolerance}, {"failed_points", failed}};
    if (std::max(max_r1, max_r2) > tolerance) {
        o.status = kExitInvariantFailure;
        o.message = "kms residual " + detail::number(std::max(max_r1, max_r2)) + " exceeds " + detail::number(tolerance);
    } else if (failed > 0) {
        o.status = kExitPartialFailure;
        o.message = std::to_string(failed) + " of " + std::to_string(grid.size()) + " kms points failed";
    }
    return o;
}

/// Holds m, R and beta fixed and halves hbar `levels` times from --hbar.
inline Outcome cmd_limit(const RunConfig& c) {
    const ModelParams p = resolve_params(c);
    const TimeRange range = resolve_range(c, p);
    const std::vector<double> grid = linear_grid(range.t_min, range.t_max, range.points);
    const std::vector<double> hbars = halving_sequence(p.hbar(), c.levels);
    const auto rows = classical_limit_scan({p.mass(), p.radius(), p.beta()}, hbars, grid, c.policy);

    Outcome o;
    o.table.columns = {"hbar", "alpha", "sup_deviation", "grid_span", "sup_modulus_deviation", "sup_order_gap"};
    for (const LimitRow& r : rows)
        o.table.rows.push_back(
            {r.hbar, r.alpha, r.sup_deviation, r.grid_span, r.sup_modulus_deviation, r.sup_order_gap});
    double slope = detail::nan();
    try {
        slope = deviation_order(rows);
    } catch (const domain_error& e) {
        o.message = std::string("slope not fitted: ") + e.what();
    }
    o.table.summary = {{"slope", slope}};
    return o;
}

inline Outcome cmd_mc(const RunConfig& c) {
    const ModelParams p = resolve_params(c);
    const TimeRange range = resolve_range(c, p);
    const std::vector<double> grid = linear_grid(range.t_min, range.t_max, range.points);

    // Same substream assignment as mc_classical, so output is independent of threading.
    std::vector<McEstimate> est(grid.size());
    detail::parallel_for(grid.size(), c.threads, [&](std::size_t i) {
        est[i] = mc_classical_point(p, grid[i], c.samples, ringcorr::detail::substream_seed(c.seed, i));
    });

    Outcome o;
    o.table.columns = {"t", "mean", "std_error", "samples", "closed_form", "z_score"};
    std::int64_t within = 0;
    for (const McEstimate& e : est) {
        const double exact = c1_classical(p, e.time);
        const double z = (e.mean - exact) / e.std_error;
        if (std::abs(e.mean - exact) <= 3.0 * e.std_error) ++within;
        o.table.rows.push_back({e.time, e.mean, e.std_error, e.samples, exact, z});
    }
    o.table.summary = {{"within_3se", within}, {"points", static_cast<std::int64_t>(est.size())}};
    return o;
}

inline Outcome cmd_selftest(const RunConfig&) {
    const auto results = selftest::run_all(selftest::kQuick);
    Outcome o;
    o.table.columns = {"invariant", "measured", "tolerance", "passed", "detail"};
    std::int64_t failed = 0;
    for (const auto& r : results) {
        o.table.rows.push_back({r.name, r.measured, r.tolerance, r.passed, r.detail});
        if (!r.passed && failed++ == 0) {
            o.status = kExitInvariantFailure;
            o.message = "selftest: first failing invariant: " + r.name;
        }
    }
    o.table.summary = {{"failed", failed}, {"total", static_cast<std::int64_t>(results.size())}};
    return o;
}

inline void write_csv(std::ostream& out, const RunConfig& c, const Table& t) {
    out << "# ringcorr " << kVersion << " command=" << to_string(c.command) << " config_hash=" << config_hash(c)
        << " generator=" << kGeneratorId << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_cell(row[i]);
        out << '\n';
    }
    for (const auto& [k, v] : t.summary) out << "# " << k << '=' << detail::csv_cell(v) << '\n';
}

inline void write_json(std::ostream& out, const RunConfig& c, const Table& t) {
    using detail::json_string;
    out << "{\"meta\":{\"program\":\"ringcorr\",\"version\":" << json_string(kVersion)
        << ",\"command\":" << json_string(to_string(c.command)) << ",\"config_hash\":" << json_string(config_hash(c))
        << ",\"generator\":" << json_string(kGeneratorId) << "},\n\"rows\":[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << (r ? ",\n" : "\n") << '{';
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            out << (i ? "," : "") << json_string(t.columns[i]) << ':' << detail::json_cell(t.rows[r][i]);
        out << '}';
    }
    out << "\n],\n\"summary\":{";
    for (std::size_t i = 0; i < t.summary.size(); ++i)
        out << (i ? "," : "") << json_string(t.summary[i].first) << ':' << detail::json_cell(t.summary[i].second);
    out << "}}\n";
}

/// Runs one command and returns its exit status. Diagnostics go to `err`;
/// data goes to `out` or to the configured output file.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    Outcome o;
    try {
        validate(c);
        switch (c.command) {
        case Command::Info: o = cmd_info(c); break;
        case Command::Scan: o = cmd_scan(c); break;
        case Command::Kms: o = cmd_kms(c); break;
        case Command::Limit: o = cmd_limit(c); break;
        case Command::Mc: o = cmd_mc(c); break;
        case Command::Selftest: o = cmd_selftest(c); break;
        }
    } catch (const usage_error& e) {
        err << "ringcorr: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ringcorr::domain_error& e) {
        err << "ringcorr: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "ringcorr: " << to_string(c.command) << " failed: " << e.what() << '\n';
        return kExitPartialFailure;
    }

    std::ostringstream buf;
    if (c.format == Format::Csv)
        write_csv(buf, c, o.table);
    else
        write_json(buf, c, o.table);
    if (c.out_path.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(c.out_path, std::ios::binary);
        if (!(f << buf.str())) {
            err << "ringcorr: cannot write " << c.out_path << '\n';
            return kExitUsage;
        }
    }
    if (!o.message.empty()) err << "ringcorr: " << o.message << '\n';
    return o.status;
}

} // namespace ringcorr::cli
