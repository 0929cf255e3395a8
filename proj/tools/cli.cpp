#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nadyn/berkovich.hpp"
#include "nadyn/complex_lab.hpp"
#include "nadyn/family.hpp"
#include "nadyn/spectra.hpp"

namespace nadyn::cli {

using json = nlohmann::ordered_json;

namespace {

struct Flags {
    std::string family;
    std::optional<int> degree;
    std::string out;
    std::uint64_t seed = 1;
    int n_max = 3;
    std::int64_t precision = kDefaultWorkingOrder;
    std::int64_t ramification_cap = 64;
    std::size_t size_budget = 5000;
    int root_iterations = AberthOptions{}.max_iterations;
    int pgr_budget = PgrOptions{}.budget;
    int pgr_max_period = PgrOptions{}.max_period;

    int n = 1;
    bool exclude_infinity = false;
    std::string theorem;
    double main5_a = 1.0;
    double main5_threshold = 0.75;
    std::string radii = "1e-2:1e-6";
    int per_decade = 2;
    int angles = 4;
    double tolerance = 0.05;
    std::string csv;
    double t0_re = 1e-4;
    double t0_im = 0.0;
};

/// Accumulated during one run.
struct Context {
    Flags flags;
    json warnings = json::array();
    bool inconclusive = false;
};

DynamicsOptions dynamics_options(const Flags& f)
{
    DynamicsOptions o;
    o.precision = RatExp(f.precision);
    o.ramification_cap = f.ramification_cap;
    o.size_budget = f.size_budget;
    o.n_max = f.n_max;
    o.aberth.max_iterations = f.root_iterations;
    o.aberth.seed = f.seed;
    return o;
}

PgrOptions pgr_options(const Flags& f)
{
    PgrOptions o;
    o.budget = f.pgr_budget;
    o.max_period = f.pgr_max_period;
    o.dynamics = dynamics_options(f);
    return o;
}

// ---- serialization -------------------------------------------------------

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json to_json(const RatExp& r) { return r.to_string(); }

json to_json(const Valuation& v) { return v.to_string(); }

json to_json(const PuiseuxSeries& s)
{
    json terms = json::array();
    for (const Term& t : s.terms()) {
        terms.push_back({{"exp", t.exp.to_string()}, {"coef", to_json(t.coef)}});
    }
    json j;
    j["text"] = s.to_string();
    j["valuation"] = to_json(s.valuation());
    j["order"] = s.order() ? json(s.order()->to_string()) : json(nullptr);
    j["terms"] = std::move(terms);
    return j;
}

const char* chart_name(Chart c) { return c == Chart::Affine ? "affine" : "flipped"; }

json to_json(const SeriesPoint& p) { return {{"chart", chart_name(p.chart)}, {"coord", to_json(p.coord)}}; }

json to_json(const CycleRecord& c)
{
    json points = json::array();
    for (const auto& p : c.points) {
        points.push_back({{"point", to_json(p.point)}, {"multiplicity", p.multiplicity}});
    }
    json j;
    j["period"] = c.period;
    j["exact_period"] = c.exact_period;
    j["class"] = cycle_class_name(c.cycle_class);
    j["formal_count"] = c.formal_count;
    j["multiplier"] = to_json(c.multiplier);
    j["multiplier_valuation"] = to_json(c.multiplier_valuation);
    j["blow_up_exponent"] = to_json(blow_up_exponent(c));
    j["points"] = std::move(points);
    return j;
}

json to_json(const TypeIIPoint& x)
{
    return {{"text", x.to_string()}, {"center", to_json(x.center())}, {"rho", to_json(x.rho())}};
}

json to_json(const PgrCertificate& c)
{
    json j;
    j["outcome"] = pgr_outcome_name(c.outcome);
    j["candidates_tested"] = c.candidates_tested;
    j["point"] = c.point ? to_json(*c.point) : json(nullptr);
    j["cycle"] = c.cycle ? to_json(*c.cycle) : json(nullptr);
    return j;
}

json to_json(const std::optional<BlowUpWitness>& w)
{
    if (!w) {
        return nullptr;
    }
    return {{"period", w->period}, {"cycle", to_json(w->cycle)}};
}

json to_json(const Period2Audit& a)
{
    json fixed = json::array();
    for (const auto& e : a.fixed_points) {
        fixed.push_back({{"point", to_json(e.point)},
                         {"local_degree", e.local_degree},
                         {"fixed_in_ball", e.fixed_in_ball},
                         {"critical_in_ball", e.critical_in_ball}});
    }
    json two = json::array();
    for (const auto& e : a.two_cycles) {
        two.push_back({{"point", to_json(e.point)},
                       {"image", to_json(e.image)},
                       {"mu_plus", e.mu_plus},
                       {"mu_minus", e.mu_minus}});
    }
    json j;
    j["fixed_points"] = std::move(fixed);
    j["two_cycles"] = std::move(two);
    j["sum_excess"] = a.sum_excess;
    j["sum_product"] = a.sum_product;
    j["excess_bound"] = a.excess_bound;
    j["product_bound"] = a.product_bound;
    j["excess_within_bound"] = a.excess_within_bound;
    j["product_above_bound"] = a.product_above_bound;
    j["balls_consistent"] = a.balls_consistent;
    j["notes"] = a.notes;
    return j;
}

json to_json(const TheoremCertificate& c)
{
    json j;
    j["theorem"] = c.theorem;
    j["verdict"] = verdict_name(c.verdict);
    j["vacuous"] = c.vacuous;
    j["period_bound"] = c.period_bound;
    j["witness"] = to_json(c.witness);
    j["pgr"] = to_json(c.pgr);
    j["audit"] = c.audit ? to_json(*c.audit) : json(nullptr);
    j["notes"] = c.notes;
    return j;
}

json series_list(const std::vector<PuiseuxSeries>& v)
{
    json j = json::array();
    for (const auto& s : v) {
        j.push_back(to_json(s));
    }
    return j;
}

json family_json(const FamilySpec& spec)
{
    json j;
    j["source"] = spec.source;
    j["canonical"] = print_family(spec.map);
    j["degree"] = spec.map.degree();
    j["polynomial"] = spec.map.is_polynomial();
    j["p"] = series_list(spec.map.p());
    j["q"] = series_list(spec.map.q());
    return j;
}

// ---- commands ------------------------------------------------------------

json cmd_analyze(Context& ctx, const RationalMap& f)
{
    CycleCache cache(f, dynamics_options(ctx.flags));
    json j;
    j["good_reduction"] = has_good_reduction(f);
    const PgrCertificate pgr = potential_good_reduction_search(cache, pgr_options(ctx.flags));
    j["pgr"] = to_json(pgr);
    j["blow_up"] = to_json(detect_blow_up(cache, ctx.flags.n_max));
    j["n_max"] = ctx.flags.n_max;
    if (pgr.outcome == PgrOutcome::Inconclusive) {
        ctx.inconclusive = true;
        ctx.warnings.push_back("potential good reduction search exhausted its budget");
    }
    return j;
}

json cmd_periodic(Context& ctx, const RationalMap& f)
{
    const int n = ctx.flags.n;
    const auto cycles = periodic_cycles(f, n, dynamics_options(ctx.flags));
    json list = json::array();
    int points = 0;
    for (const auto& c : cycles) {
        list.push_back(to_json(c));
        for (const auto& p : c.points) {
            points += p.multiplicity;
        }
    }
    json j;
    j["period"] = n;
    j["points_with_multiplicity"] = points;
    j["formal_cycles"] = formal_cycle_count(cycles);
    j["lyap_na_estimate"] = to_json(lyap_na_estimate(cycles, f.degree(), n));
    j["cycles"] = std::move(list);
    return j;
}

json cmd_spectrum(Context& ctx, const RationalMap& f)
{
    const SpectrumReport r = lambda_spectrum(f, ctx.flags.n, ctx.flags.exclude_infinity, dynamics_options(ctx.flags));
    json j;
    j["period"] = r.period;
    j["excludes_infinity"] = r.excludes_infinity;
    j["multipliers"] = series_list(r.multipliers);
    j["symmetric_functions"] = series_list(r.symmetric_functions);
    j["pole_flags"] = r.pole_flags;
    return j;
}

json check_main5(Context& ctx, const RationalMap& f)
{
    const Flags& fl = ctx.flags;
    CycleCache cache(f, dynamics_options(fl));
    json rows = json::array();
    bool nondecreasing = true;
    double last = -1.0;
    RatExp lambda;
    for (int n = 1; n <= fl.n_max; ++n) {
        const Main5Report r = check_main5_fraction(cache, n, fl.main5_a, fl.n_max);
        lambda = r.lambda;
        nondecreasing = nondecreasing && r.fraction >= last;
        last = r.fraction;
        rows.push_back({{"period", n}, {"qualifying", r.qualifying}, {"fraction", r.fraction}});
    }
    const bool verified = nondecreasing && last >= fl.main5_threshold;
    if (!verified) {
        ctx.inconclusive = true;
    }
    json j;
    j["theorem"] = "main5";
    j["verdict"] = verdict_name(verified ? Verdict::Verified : Verdict::Inconclusive);
    j["lambda"] = to_json(lambda);
    j["lambda_period"] = fl.n_max;
    j["a"] = fl.main5_a;
    j["threshold"] = fl.main5_threshold;
    j["nondecreasing"] = nondecreasing;
    j["rows"] = std::move(rows);
    return j;
}

json check_milnor(Context& ctx, const RationalMap& f)
{
    const MilnorReport r = milnor_quadratic_check(f, dynamics_options(ctx.flags));
    Verdict v = r.relation_holds ? Verdict::Verified : Verdict::CounterexampleCandidate;
    // Pole cancellation in sigma_1, sigma_3 can leave a truncation residue.
    if (!r.relation_holds && r.degenerate) {
        v = Verdict::Inconclusive;
        ctx.inconclusive = true;
    }
    json j;
    j["theorem"] = "milnor";
    j["verdict"] = verdict_name(v);
    j["multipliers"] = series_list(r.multipliers);
    j["sigma1"] = to_json(r.sigma1);
    j["sigma2"] = to_json(r.sigma2);
    j["sigma3"] = to_json(r.sigma3);
    j["relation_defect"] = r.relation_defect;
    j["degenerate"] = r.degenerate;
    return j;
}

json cmd_check(Context& ctx, const RationalMap& f)
{
    const std::string& th = ctx.flags.theorem;
    if (th == "main5") {
        return check_main5(ctx, f);
    }
    if (th == "milnor") {
        return check_milnor(ctx, f);
    }
    CheckOptions opts;
    opts.dynamics = dynamics_options(ctx.flags);
    opts.pgr = pgr_options(ctx.flags);
    TheoremCertificate cert;
    if (th == "period2") {
        cert = check_period2(f, opts);
    } else if (th == "period3") {
        cert = check_period3(f, opts);
    } else if (th == "main2") {
        cert = check_main2(f, opts);
    } else {
        cert = check_dichotomy(f, ctx.flags.n_max, opts);
    }
    if (cert.verdict == Verdict::Inconclusive) {
        ctx.inconclusive = true;
    }
    return to_json(cert);
}

std::pair<double, double> parse_radii(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::PreconditionFailed, "--radii expects r_max:r_min, got '" + text + "'");
    }
    try {
        double a = std::stod(text.substr(0, colon));
        double b = std::stod(text.substr(colon + 1));
        if (a < b) {
            std::swap(a, b);
        }
        return {a, b};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::PreconditionFailed, "--radii expects two numbers, got '" + text + "'");
    }
}

void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        if (!os) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

json cmd_scan(Context& ctx, const RationalMap& f)
{
    const Flags& fl = ctx.flags;
    const auto [r_max, r_min] = parse_radii(fl.radii);
    const SampleGrid grid = log_grid(r_max, r_min, fl.per_decade, fl.angles, fl.seed);
    const ScalingReport r = scaling_fit(f, fl.n, grid, dynamics_options(fl), fl.tolerance, true);

    json fits = json::array();
    for (const auto& c : r.fits) {
        json e;
        e["cycle_id"] = c.cycle_id;
        e["exact_period"] = c.exact_period;
        e["point"] = c.point;
        e["predicted"] = to_json(c.predicted);
        e["matched"] = c.matched;
        if (c.matched) {
            e["slope"] = c.slope;
            e["intercept"] = c.intercept;
            e["residual"] = c.residual;
            e["agrees"] = c.agrees;
        } else {
            e["lost_reason"] = c.lost_reason;
            ctx.warnings.push_back("cycle " + std::to_string(c.cycle_id) + " lost: " + c.lost_reason);
        }
        fits.push_back(std::move(e));
    }

    std::string csv_path = fl.csv;
    if (csv_path.empty() && !fl.out.empty()) {
        csv_path = std::filesystem::path(fl.out).replace_extension(".csv").string();
    }
    if (!csv_path.empty()) {
        std::ostringstream os;
        write_scan_csv(os, r.rows);
        write_atomically(csv_path, os.str());
    } else {
        ctx.warnings.push_back("no --csv or --out path given; sample rows not written");
    }

    json j;
    j["period"] = r.period;
    j["radii"] = grid.radii;
    j["angles_per_radius"] = grid.angles_per_radius;
    j["tolerance"] = fl.tolerance;
    j["samples"] = r.rows.size();
    j["max_root"] = r.max_root;
    j["csv"] = csv_path.empty() ? json(nullptr) : json(csv_path);
    j["fits"] = std::move(fits);
    return j;
}

json cmd_consistency(Context& ctx, const RationalMap& f)
{
    const Complex t0(ctx.flags.t0_re, ctx.flags.t0_im);
    const ConsistencyReport r = consistency_check(f, ctx.flags.n, t0, dynamics_options(ctx.flags));
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"point", row.point},
                        {"chart", chart_name(row.chart)},
                        {"predicted", to_json(row.predicted)},
                        {"numeric", to_json(row.numeric)},
                        {"mismatch", row.mismatch},
                        {"bound", row.bound}});
    }
    json j;
    j["t0"] = to_json(r.t0);
    j["period"] = r.period;
    j["max_mismatch"] = r.max_mismatch;
    j["rows"] = std::move(rows);
    return j;
}

json budgets_json(const Flags& f)
{
    json j;
    j["n_max"] = f.n_max;
    j["precision"] = f.precision;
    j["ramification_cap"] = f.ramification_cap;
    j["size_budget"] = f.size_budget;
    j["root_iterations"] = f.root_iterations;
    j["pgr_budget"] = f.pgr_budget;
    j["pgr_max_period"] = f.pgr_max_period;
    return j;
}

void add_family_args(CLI::App* sub, Flags& f)
{
    sub->add_option("family", f.family, "family specification, or @path to read it from a file")->required();
}

std::string load_family_text(const std::string& arg)
{
    if (arg.empty() || arg.front() != '@') {
        return arg;
    }
    std::ifstream is(arg.substr(1));
    if (!is) {
        throw Error(ErrorCode::PreconditionFailed, "cannot read family file " + arg.substr(1));
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Context ctx;
    Flags& fl = ctx.flags;

    CLI::App app{"Dynamics of degenerating families of rational maps over Puiseux series"};
    app.name("nadyn");
    app.fallthrough();
    app.require_subcommand(1);

    app.add_option("--out,-o", fl.out, "write the JSON report here instead of stdout");
    app.add_option("--seed", fl.seed, "seed for sampling grids and root-finder restarts");
    app.add_option("--degree", fl.degree, "declared map degree; checked against the parsed family");
    app.add_option("--n-max", fl.n_max, "largest period searched")->check(CLI::Range(1, 12));
    app.add_option("--precision", fl.precision, "t-adic truncation order")->check(CLI::Range(1, 200));
    app.add_option("--ramification-cap", fl.ramification_cap, "largest Puiseux denominator")->check(CLI::PositiveNumber);
    app.add_option("--size-budget", fl.size_budget, "term budget for iterates");
    app.add_option("--root-iterations", fl.root_iterations, "Aberth iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--pgr-budget", fl.pgr_budget, "candidates tried by the reduction search")->check(CLI::NonNegativeNumber);
    app.add_option("--pgr-max-period", fl.pgr_max_period, "largest period searched for a fixed type II point")
        ->check(CLI::Range(1, 6));

    auto* analyze = app.add_subcommand("analyze", "good reduction, reduction search and blow-up witness");
    add_family_args(analyze, fl);

    auto* periodic = app.add_subcommand("periodic", "periodic points and cycles of period n");
    add_family_args(periodic, fl);
    periodic->add_option("--n", fl.n, "period")->check(CLI::Range(1, 12));

    auto* spectrum = app.add_subcommand("spectrum", "multiplier spectrum and symmetric functions");
    add_family_args(spectrum, fl);
    spectrum->add_option("--n", fl.n, "period")->check(CLI::Range(1, 12));
    spectrum->add_flag("--exclude-infinity", fl.exclude_infinity, "drop the fixed point at infinity (polynomials)");

    auto* check = app.add_subcommand("check", "theorem certificate");
    add_family_args(check, fl);
    check->add_option("--theorem", fl.theorem, "theorem to check")
        ->required()
        ->check(CLI::IsMember({"period2", "period3", "main2", "main5", "milnor", "dichotomy"}));
    check->add_option("--a", fl.main5_a, "constant A of the main5 count")->check(CLI::PositiveNumber);
    check->add_option("--threshold", fl.main5_threshold, "main5 fraction reported as verified at n_max");

    auto* scan = app.add_subcommand("scan", "complex sampling grid and growth fits");
    add_family_args(scan, fl);
    scan->add_option("--n", fl.n, "period")->check(CLI::Range(1, 8));
    scan->add_option("--radii", fl.radii, "r_max:r_min with r_max <= 0.5");
    scan->add_option("--per-decade", fl.per_decade, "radii per decade")->check(CLI::PositiveNumber);
    scan->add_option("--angles", fl.angles, "angles per radius")->check(CLI::PositiveNumber);
    scan->add_option("--tolerance", fl.tolerance, "slope agreement tolerance")->check(CLI::PositiveNumber);
    scan->add_option("--csv", fl.csv, "CSV file for the sample rows");

    auto* consistency = app.add_subcommand("consistency", "Puiseux points against numeric roots at t0");
    add_family_args(consistency, fl);
    consistency->add_option("--n", fl.n, "period")->check(CLI::Range(1, 8));
    consistency->add_option("--t0", fl.t0_re, "real part of t0");
    consistency->add_option("--t0-im", fl.t0_im, "imaginary part of t0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kVerdict;
    } catch (const CLI::ParseError& e) {
        err << "nadyn: UsageError: " << e.what() << "\n";
        return kError;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::map<std::string, std::function<json(Context&, const RationalMap&)>> commands{
        {"analyze", cmd_analyze}, {"periodic", cmd_periodic}, {"spectrum", cmd_spectrum},
        {"check", cmd_check},     {"scan", cmd_scan},         {"consistency", cmd_consistency},
    };

    json report;
    report["schema"] = kSchema;
    report["command"] = sub->get_name();
    report["metadata"] = {{"tool", "nadyn"}, {"version", kVersion}, {"seed", fl.seed}, {"budgets", budgets_json(fl)}};
    int code = kVerdict;
    try {
        const FamilySpec spec = parse_family(load_family_text(fl.family), fl.degree);
        validate_family(spec.map);
        report["family"] = family_json(spec);
        report["payload"] = commands.at(sub->get_name())(ctx, spec.map);
        code = ctx.inconclusive ? kInconclusive : kVerdict;
        report["status"] = ctx.inconclusive ? "inconclusive" : "verdict";
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
        err << "nadyn: " << e.what() << "\n";
        code = kError;
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = {{"code", "InternalError"}, {"message", e.what()}};
        err << "nadyn: InternalError: " << e.what() << "\n";
        code = kError;
    }
    report["warnings"] = ctx.warnings;

    const std::string text = report.dump(2) + "\n";
    if (fl.out.empty()) {
        out << text;
    } else {
        try {
            write_atomically(fl.out, text);
        } catch (const std::exception& e) {
            err << "nadyn: InternalError: " << e.what() << "\n";
            return kError;
        }
    }
    return code;
}

} // namespace nadyn::cli
