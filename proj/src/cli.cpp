#include "srcorr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "srcorr/correlation.hpp"
#include "srcorr/errors.hpp"
#include "srcorr/fock.hpp"
#include "srcorr/montecarlo.hpp"

namespace srcorr::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kExactTolerance = 1e-9;
constexpr double kFockTolerance = 1e-6;
constexpr double kMcStandardErrors = 4.0;

// Rejected configuration; the message names the offending flag.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& field, const std::string& why)
        : std::invalid_argument("invalid " + field + ": " + why) {}
};

enum class Route { closed, partition, functional, permanent, fock, mc };
constexpr Route kAllRoutes[] = {Route::closed, Route::partition, Route::functional,
                                Route::permanent, Route::fock, Route::mc};

std::string route_name(Route r) {
    switch (r) {
        case Route::closed: return "closed";
        case Route::partition: return "partition";
        case Route::functional: return "functional";
        case Route::permanent: return "permanent";
        case Route::fock: return "fock";
        case Route::mc: return "mc";
    }
    return "?";
}

struct Options {
    std::string stats = "thermal";
    int n_sources = 2;
    int m = 2;
    double nbar = 1.0;
    double kd = 2.0 * kPi;
    double theta1_deg = 0.0;
    std::string grid;
    bool theta_scan = false;
    std::string normalize = "raw";
    std::string route;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 20240601;
    std::uint64_t batch = 0;
    unsigned workers = 0;
    int nmax = -1;
    std::string format = "csv";
    std::string out;
    double kD = 20.0 * kPi;
    int m_min = 2;
    int m_max = 10;
    int cap = 10;
};

struct GridSpec {
    double lo;
    double hi;
    int points;
};

GridSpec parse_grid(const std::string& text, GridSpec fallback) {
    if (text.empty()) return fallback;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("--grid", "expected lo:hi:points");
    GridSpec g{};
    try {
        g.lo = std::stod(parts[0]);
        g.hi = std::stod(parts[1]);
        g.points = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw ValidationError("--grid", "expected numbers in lo:hi:points");
    }
    if (g.points < 1) throw ValidationError("--grid", "points must be >= 1");
    if (g.points > 1 && !(g.hi > g.lo)) throw ValidationError("--grid", "hi must exceed lo");
    return g;
}

PhotonStatistics parse_stats(const Options& o) {
    if (o.stats == "spe") return PhotonStatistics::single_photon();
    if (o.stats == "thermal") return PhotonStatistics::thermal(o.nbar);
    if (o.stats == "coherent") return PhotonStatistics::coherent(o.nbar);
    if (o.stats.rfind("custom:", 0) == 0) {
        try {
            return PhotonStatistics::load_custom(o.stats.substr(7));
        } catch (const std::invalid_argument& e) {
            throw ValidationError("--stats", e.what());
        }
    }
    throw ValidationError("--stats", "expected spe, thermal, coherent or custom:FILE");
}

Normalization parse_normalization(const std::string& s) {
    if (s == "raw") return Normalization::raw;
    if (s == "g") return Normalization::by_g1_product;
    if (s == "avg") return Normalization::by_angular_average;
    throw ValidationError("--normalize", "expected raw, g or avg");
}

void validate_common(const Options& o) {
    if (o.n_sources < 1) throw ValidationError("--N", "must be >= 1");
    if (o.m < 1) throw ValidationError("--m", "must be >= 1");
    if (!(o.nbar > 0.0) || !std::isfinite(o.nbar)) throw ValidationError("--nbar", "must be positive");
    if (!(o.kd > 0.0) || !std::isfinite(o.kd)) throw ValidationError("--kd", "must be positive");
    if (!(std::abs(o.theta1_deg) <= 90.0)) throw ValidationError("--theta1-deg", "must lie in [-90, 90]");
    if (o.samples < 1) throw ValidationError("--samples", "must be >= 1");
    if (o.batch > o.samples) throw ValidationError("--batch", "must not exceed --samples");
}

McConfig mc_config(const Options& o) {
    McConfig cfg;
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.batch = o.batch ? o.batch : std::max<std::uint64_t>(1, o.samples / 100);
    cfg.workers = o.workers;
    return cfg;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// --- route evaluation ------------------------------------------------------------

struct Context {
    Options opt;
    PhotonStatistics stats;
    SourceChain chain;
    double theta1;
};

struct Point {
    double x;
    double phi;
    std::optional<double> theta2;  // known up front on theta scans
};

struct RouteResult {
    Route route;
    std::vector<double> values;
    std::vector<double> std_errors;  // Monte Carlo only
};

bool applicable(Route r, const PhotonStatistics& s) {
    switch (r) {
        case Route::closed: return s.is_thermal() || s.is_coherent();
        case Route::functional: return s.is_coherent();
        case Route::partition: return true;
        case Route::permanent: return s.is_thermal();
        case Route::fock: return true;
        case Route::mc: return s.is_classical();
    }
    return false;
}

void require_applicable(Route r, const PhotonStatistics& s) {
    if (applicable(r, s)) return;
    if (r == Route::mc)
        throw UnsupportedStatistics("route mc: '" + s.name() +
                                    "' statistics have no positive P function and cannot be sampled classically");
    throw ValidationError("--route", "route " + route_name(r) + " does not apply to " + s.name() + " statistics");
}

std::size_t fock_dimension(int n_sources, int n_max) {
    std::size_t d = 1;
    for (int i = 0; i < n_sources; ++i) {
        d *= static_cast<std::size_t>(n_max + 1);
        if (d > (std::size_t{1} << 40)) break;
    }
    return d;
}

int fock_cutoff(const Context& c) { return c.opt.nmax >= 0 ? c.opt.nmax : default_cutoff(c.stats); }

bool fock_feasible(const Context& c) {
    return fock_dimension(c.chain.size(), fock_cutoff(c)) <= FockLimits{}.max_dimension;
}

std::string fock_frontier(const Context& c) {
    int best = 0;
    while (fock_dimension(c.chain.size(), best + 1) <= FockLimits{}.max_dimension) ++best;
    return "fock dimension (" + std::to_string(fock_cutoff(c)) + "+1)^" + std::to_string(c.chain.size()) +
           " exceeds budget " + std::to_string(FockLimits{}.max_dimension) + "; largest n_max for N=" +
           std::to_string(c.chain.size()) + " is " + std::to_string(best);
}

double theta2_of(const Context& c, const Point& p) {
    if (p.theta2) return *p.theta2;
    try {
        return theta2_for_phase(c.chain, c.theta1, p.phi);
    } catch (const std::domain_error&) {
        throw ValidationError("--kd", "phase " + format_double(p.phi) +
                                          " is not reachable by any detector angle; increase kd or narrow --grid");
    }
}

RouteResult evaluate(Route r, const Context& c, const std::vector<Point>& pts) {
    require_applicable(r, c.stats);
    const int n = c.chain.size();
    const int m = c.opt.m;
    RouteResult res{r, {}, {}};
    res.values.reserve(pts.size());
    switch (r) {
        case Route::closed:
            for (const auto& p : pts)
                res.values.push_back(c.stats.is_thermal() ? g_tls_closed_at(n, m, c.opt.nbar, p.phi)
                                                          : g_cls_closed_at(n, m, c.opt.nbar, p.phi));
            break;
        case Route::functional:
            for (const auto& p : pts) res.values.push_back(g_cls_functional_at(n, m, c.opt.nbar, p.phi));
            break;
        case Route::partition: {
            std::vector<double> phis;
            for (const auto& p : pts) phis.push_back(p.phi);
            res.values = g_general(c.stats, n, m, phis).values;
            break;
        }
        case Route::permanent:
            for (const auto& p : pts) {
                const auto dets = superradiant_detectors(m, c.theta1, theta2_of(c, p));
                res.values.push_back(thermal_permanent_gm(c.chain, dets, c.opt.nbar));
            }
            break;
        case Route::fock: {
            if (!fock_feasible(c)) throw ResourceLimit(fock_frontier(c));
            const auto rho = build_density(c.stats, n, c.opt.nmax);
            for (const auto& p : pts) {
                const auto dets = superradiant_detectors(m, c.theta1, theta2_of(c, p));
                res.values.push_back(gm_exact(rho, c.chain, dets));
            }
            break;
        }
        case Route::mc: {
            const std::vector<Detector> fixed(static_cast<std::size_t>(m - 1), Detector(c.theta1));
            std::vector<Detector> scan;
            for (const auto& p : pts) scan.emplace_back(theta2_of(c, p));
            for (const auto& e : mc_gm_scan(c.chain, fixed, scan, c.stats, mc_config(c.opt))) {
                res.values.push_back(e.mean);
                res.std_errors.push_back(e.std_error);
            }
            break;
        }
    }
    return res;
}

std::vector<Route> parse_routes(const std::string& text, const Context& c, std::vector<std::string>& notes) {
    std::vector<Route> routes;
    if (text == "all") {
        for (Route r : kAllRoutes) {
            if (!applicable(r, c.stats)) continue;
            if (r == Route::fock && !fock_feasible(c)) {
                notes.push_back("skipped: " + fock_frontier(c));
                continue;
            }
            routes.push_back(r);
        }
        return routes;
    }
    std::stringstream ss(text);
    for (std::string name; std::getline(ss, name, ',');) {
        const auto it = std::find_if(std::begin(kAllRoutes), std::end(kAllRoutes),
                                     [&](Route r) { return route_name(r) == name; });
        if (it == std::end(kAllRoutes))
            throw ValidationError("--route", "unknown route '" + name +
                                                 "' (closed, partition, functional, permanent, fock, mc, all)");
        require_applicable(*it, c.stats);
        routes.push_back(*it);
    }
    if (routes.empty()) throw ValidationError("--route", "no route selected");
    return routes;
}

Context make_context(const Options& o) {
    validate_common(o);
    PhotonStatistics stats = parse_stats(o);
    return Context{o, std::move(stats), SourceChain::from_kd(o.n_sources, o.kd), o.theta1_deg * kDeg};
}

std::vector<Point> make_points(const Context& c, const GridSpec& g) {
    std::vector<Point> pts;
    for (double x : uniform_grid(g.lo, g.hi, g.points)) {
        if (c.opt.theta_scan) {
            if (std::abs(x) > 90.0) throw ValidationError("--grid", "theta2 values must lie in [-90, 90] degrees");
            const double t2 = x * kDeg;
            pts.push_back({x, delta_phase(c.chain, c.theta1, t2), t2});
        } else {
            pts.push_back({x, x, std::nullopt});
        }
    }
    return pts;
}

std::vector<std::pair<std::string, std::string>> base_config(const std::string& command, const Context& c) {
    const auto& o = c.opt;
    return {{"command", command},
            {"stats", c.stats.describe()},
            {"N", std::to_string(o.n_sources)},
            {"m", std::to_string(o.m)},
            {"kd", format_double(o.kd)},
            {"theta1_deg", format_double(o.theta1_deg)},
            {"x", o.theta_scan ? "theta2_deg" : "phi_delta_rad"}};
}

void add_route_config(Table& t, const Context& c, const std::vector<Route>& routes) {
    std::string names;
    for (Route r : routes) names += (names.empty() ? "" : "|") + route_name(r);
    t.config.emplace_back("routes", names);
    const bool mc = std::find(routes.begin(), routes.end(), Route::mc) != routes.end();
    const bool fock = std::find(routes.begin(), routes.end(), Route::fock) != routes.end();
    if (mc) {
        const auto cfg = mc_config(c.opt);
        t.config.emplace_back("samples", std::to_string(cfg.samples));
        t.config.emplace_back("batch", std::to_string(cfg.batch));
        t.config.emplace_back("seed", std::to_string(cfg.seed));
    }
    if (fock) t.config.emplace_back("nmax", std::to_string(fock_cutoff(c)));
}

// --- commands ---------------------------------------------------------------------

int cmd_scan(const Options& o, Table& t) {
    const Context c = make_context(o);
    const Normalization norm = parse_normalization(o.normalize);
    const GridSpec g = parse_grid(o.grid, o.theta_scan ? GridSpec{-90.0, 90.0, 1024} : GridSpec{-kPi, kPi, 1024});
    const auto pts = make_points(c, g);
    const auto routes = parse_routes(o.route.empty() ? "partition" : o.route, c, t.notes);

    double scale = 1.0;
    if (norm == Normalization::by_g1_product) {
        scale = g1_product(c.stats, c.chain.size(), o.m);
    } else if (norm == Normalization::by_angular_average) {
        const int n = c.chain.size();
        const auto terms = g_general(c.stats, n, o.m, uniform_grid(-kPi, kPi - 2.0 * kPi / 4096, 4096));
        double sum = 0.0;
        for (double v : terms.values) sum += v;
        scale = sum / 4096.0;
    }
    if (!(scale > 0.0)) throw NumericalError("normalization scale vanishes (degenerate correlation function)");

    t.config = base_config("scan", c);
    t.config.emplace_back("grid", format_double(g.lo) + ":" + format_double(g.hi) + ":" + std::to_string(g.points));
    t.config.emplace_back("normalize", to_string(norm));
    t.config.emplace_back("normalization_scale", format_double(scale));
    add_route_config(t, c, routes);
    t.columns = {"x", "value", "route"};
    for (Route r : routes) {
        const auto res = evaluate(r, c, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            t.rows.push_back({pts[i].x, res.values[i] / scale, route_name(r)});
    }
    if (c.stats.is_single_photon() && o.m > o.n_sources)
        t.notes.push_back("diagnostic: single-photon emitters cannot supply m > N photons; G vanishes");
    return kOk;
}

int cmd_compare(const Options& o, Table& t) {
    const Context c = make_context(o);
    const GridSpec g = parse_grid(o.grid, o.theta_scan ? GridSpec{-30.0, 30.0, 17} : GridSpec{-kPi, kPi, 17});
    const auto pts = make_points(c, g);
    const auto routes = parse_routes(o.route.empty() ? "all" : o.route, c, t.notes);
    const Route reference = applicable(Route::closed, c.stats) ? Route::closed : Route::partition;
    const auto ref = evaluate(reference, c, pts);
    const double peak = *std::max_element(ref.values.begin(), ref.values.end());

    t.config = base_config("compare", c);
    t.config.emplace_back("grid", format_double(g.lo) + ":" + format_double(g.hi) + ":" + std::to_string(g.points));
    t.config.emplace_back("reference", route_name(reference));
    add_route_config(t, c, routes);
    t.columns = {"x", "route", "value", "reference", "deviation", "tolerance", "pass"};

    bool all_pass = true;
    for (Route r : routes) {
        if (r == reference) continue;
        const auto res = evaluate(r, c, pts);
        const double tol = r == Route::mc ? kMcStandardErrors : r == Route::fock ? kFockTolerance : kExactTolerance;
        double worst = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double diff = std::abs(res.values[i] - ref.values[i]);
            // MC deviations are in standard errors, the rest relative
            const double dev = r == Route::mc ? diff / res.std_errors[i]
                                              : diff / std::max(std::abs(ref.values[i]), 1e-12 * peak);
            const bool pass = dev <= tol;
            all_pass = all_pass && pass;
            worst = std::max(worst, dev);
            t.rows.push_back({pts[i].x, route_name(r), res.values[i], ref.values[i], dev, tol,
                              std::string(pass ? "pass" : "fail")});
        }
        t.notes.push_back("max_deviation " + route_name(r) + ": " + format_double(worst) +
                          (r == Route::mc ? " SE" : " relative"));
    }
    t.notes.push_back(std::string("verdict: ") + (all_pass ? "pass" : "fail"));
    return all_pass ? kOk : kVerdictFailed;
}

int cmd_visibility(const Options& o, Table& t) {
    if (o.m_min < 2) throw ValidationError("--m-min", "must be >= 2");
    if (o.m_max < o.m_min) throw ValidationError("--m-max", "must be >= --m-min");
    if (o.m_max > o.cap)
        throw ResourceLimit("--m-max " + std::to_string(o.m_max) + " exceeds the cap m = N <= " + std::to_string(o.cap) +
                            " (raise --cap to override)");
    t.config = {{"command", "visibility"}, {"m_min", std::to_string(o.m_min)}, {"m_max", std::to_string(o.m_max)},
                {"configuration", "m = N"}, {"definition", "(max-min)/(max+min) over one period"}};
    t.columns = {"m", "V_SPE", "V_CLS", "V_TLS"};
    bool ordered = true;
    for (int m = o.m_min; m <= o.m_max; ++m) {
        const auto grid = commensurate_phase_grid(m);
        const double spe = visibility(g_general(PhotonStatistics::single_photon(), m, m, grid));
        const double cls = visibility(g_cls_closed(m, m, 1.0, grid));
        const double tls = visibility(g_tls_closed(m, m, 1.0, grid));
        ordered = ordered && spe > cls && cls > tls;
        t.rows.push_back({static_cast<long long>(m), spe, cls, tls});
    }
    t.notes.push_back(std::string("ordering V_SPE > V_CLS > V_TLS: ") + (ordered ? "holds" : "violated"));
    return ordered ? kOk : kVerdictFailed;
}

int cmd_hbt(const Options& o, Table& t, bool n_given) {
    const int n = n_given ? o.n_sources : 200;
    if (n < 1) throw ValidationError("--N", "must be >= 1");
    if (!(o.kD > 0.0) || !std::isfinite(o.kD)) throw ValidationError("--kD", "must be positive");
    // default grid spans the central region |kD sin(theta2)/2| <= 3 pi
    const double edge = std::asin(std::min(1.0, 6.0 * kPi / o.kD)) / kDeg;
    const GridSpec g = parse_grid(o.grid, GridSpec{-edge, edge, 2001});
    if (std::abs(g.lo) > 90.0 || std::abs(g.hi) > 90.0)
        throw ValidationError("--grid", "theta2 values must lie in [-90, 90] degrees");
    std::vector<double> theta;
    for (double x : uniform_grid(g.lo, g.hi, g.points)) theta.push_back(x * kDeg);

    const auto limit = hbt_limit(o.kD, theta);
    const auto chain = hbt_chain_curve(n, o.kD, theta);
    const auto cmp = hbt_compare(n, o.kD, theta);

    t.config = {{"command", "hbt"}, {"N", std::to_string(n)}, {"kD", format_double(o.kD)},
                {"kd", format_double(o.kD / n)}, {"theta1_deg", "0"}, {"x", "theta2_deg"},
                {"grid", format_double(g.lo) + ":" + format_double(g.hi) + ":" + std::to_string(g.points)},
                {"central_region", "|kD sin(theta2)/2| <= 3pi"}};
    t.columns = {"x", "value", "route"};
    for (std::size_t i = 0; i < theta.size(); ++i) t.rows.push_back({theta[i] / kDeg, limit.values[i], std::string("sinc2")});
    for (std::size_t i = 0; i < theta.size(); ++i) t.rows.push_back({theta[i] / kDeg, chain.values[i], std::string("chain")});
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (std::abs(0.5 * o.kD * std::sin(theta[i])) > 3.0 * kPi) continue;
        t.rows.push_back({theta[i] / kDeg, std::abs(chain.values[i] - limit.values[i]) / limit.values[i],
                          std::string("deviation")});
    }
    t.notes.push_back("max_central_deviation: " + format_double(cmp.max_relative_deviation));
    t.notes.push_back("central_points: " + std::to_string(cmp.points_in_region));
    return kOk;
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--stats", o.stats, "spe | thermal | coherent | custom:FILE");
    app->add_option("--N", o.n_sources, "number of sources");
    app->add_option("--m", o.m, "correlation order");
    app->add_option("--nbar", o.nbar, "mean photon number per source (thermal/coherent, default 1)");
    app->add_option("--kd", o.kd, "dimensionless k*d (default 2pi)");
    app->add_option("--theta1-deg", o.theta1_deg, "direction of the m-1 fixed detectors, degrees");
    app->add_option("--grid", o.grid, "lo:hi:points (radians of phi_delta, or degrees with --theta-scan)");
    app->add_flag("--theta-scan", o.theta_scan, "grid is the scanning detector angle theta2 in degrees");
    app->add_option("--route", o.route, "closed|partition|functional|permanent|fock|mc|all, comma separated");
    app->add_option("--samples", o.samples, "Monte Carlo samples");
    app->add_option("--seed", o.seed, "Monte Carlo seed");
    app->add_option("--batch", o.batch, "Monte Carlo batch size (default samples/100)");
    app->add_option("--workers", o.workers, "Monte Carlo worker threads (0 = all cores)");
    app->add_option("--nmax", o.nmax, "Fock cutoff per mode (default: tail mass < 1e-10)");
    app->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--out", o.out, "output path (default stdout)");
}

} // namespace

// --- table I/O -----------------------------------------------------------------------

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

Cell parse_cell(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return v;
    if (s == "inf" || s == "-inf" || s == "nan") return std::stod(s);
    return s;
}

} // namespace

void write_csv(std::ostream& os, const Table& t) {
    os << "# config:";
    for (std::size_t i = 0; i < t.config.size(); ++i)
        os << (i ? "; " : " ") << t.config[i].first << "=" << t.config[i].second;
    os << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << "\n";
    }
    for (const auto& n : t.notes) os << "# " << n << "\n";
}

void write_json(std::ostream& os, const Table& t) {
    nlohmann::ordered_json j;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.config) j["config"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { r[t.columns[i]] = v; }, row[i]);
        j["rows"].push_back(std::move(r));
    }
    j["notes"] = t.notes;
    os << std::setprecision(17) << j.dump(2) << "\n";
}

Table read_csv(std::istream& is) {
    Table t;
    bool have_header = false;
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        if (line.rfind("# config:", 0) == 0) {
            std::stringstream ss(line.substr(9));
            for (std::string kv; std::getline(ss, kv, ';');) {
                const auto first = kv.find_first_not_of(' ');
                if (first == std::string::npos) continue;
                kv = kv.substr(first);
                const auto eq = kv.find('=');
                t.config.emplace_back(kv.substr(0, eq), eq == std::string::npos ? "" : kv.substr(eq + 1));
            }
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            t.notes.push_back(line.substr(2));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (!have_header) {
            t.columns = fields;
            have_header = true;
            continue;
        }
        std::vector<Cell> row;
        for (const auto& f : fields) row.push_back(parse_cell(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// --- entry point ----------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatial intensity correlations of N independent sources (superradiant configuration)"};
    app.require_subcommand(1);
    Options o;
    auto* scan = app.add_subcommand("scan", "correlation curve over phi_delta or theta2");
    auto* vis = app.add_subcommand("visibility", "visibility table for m = N (SPE, CLS, TLS)");
    auto* cmp = app.add_subcommand("compare", "cross-route validation on a shared grid");
    auto* hbt = app.add_subcommand("hbt", "finite chain against the 1 + sinc^2 limit");
    for (auto* sub : {scan, vis, cmp, hbt}) add_common(sub, o);
    scan->add_option("--normalize", o.normalize, "raw | g (divide by G1 product) | avg (divide by period average)")
        ->check(CLI::IsMember({"raw", "g", "avg"}));
    vis->add_option("--m-min", o.m_min, "smallest m = N");
    vis->add_option("--m-max", o.m_max, "largest m = N");
    vis->add_option("--cap", o.cap, "largest m = N allowed");
    hbt->add_option("--kD", o.kD, "dimensionless k*D, D = N d the source extent (default 20pi)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    Table table;
    int code = kOk;
    try {
        if (*scan) code = cmd_scan(o, table);
        else if (*vis) code = cmd_visibility(o, table);
        else if (*cmp) code = cmd_compare(o, table);
        else code = cmd_hbt(o, table, hbt->count("--N") > 0);
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << "\n";
        return kResourceCap;
    } catch (const UnsupportedStatistics& e) {
        err << "error: unsupported statistics: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kVerdictFailed;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) {
            err << "error: invalid --out: cannot open " << o.out << "\n";
            return kValidation;
        }
        sink = &file;
    }
    if (o.format == "json")
        write_json(*sink, table);
    else
        write_csv(*sink, table);
    for (const auto& n : table.notes)
        if (n.rfind("verdict: fail", 0) == 0 || n.find("violated") != std::string::npos) err << n << "\n";
    return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("srcorr");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace srcorr::cli
