#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracsum/capacity.hpp"
#include "fracsum/config.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/experiments.hpp"
#include "fracsum/fractal.hpp"
#include "fracsum/hitting.hpp"
#include "fracsum/plot_data.hpp"
#include "fracsum/randomsets.hpp"
#include "fracsum/shapes.hpp"
#include "fracsum/text_format.hpp"

namespace fs = std::filesystem;
using namespace fracsum;

namespace {

constexpr int kExitUsage = 1;

void emit(std::string const& text, std::string const& out)
{
    if (out.empty() || out == "-")
        std::cout << text << std::flush;
    else
        write_text_file(out, text);
}

PointSet load_target(std::string const& path, int d)
{
    PointSet s = read_point_set_file(path);
    if (d > 0 && s.dim() != d)
        throw DimensionMismatch("target file has d=" + std::to_string(s.dim()) + ", expected d="
                                + std::to_string(d));
    return s;
}

//---------------------------------------------------------------------------//
struct CapArgs
{
    std::string points;
    std::string shape;
    int level = 0;
    double beta = 1;
    double tol = 1e-8;
    long long max_iterations = 100000;
    bool bruteforce = false;
    double step = 1e-3;
    std::string out;
};

int run_cap(CapArgs const& a)
{
    PointSet set;
    if (!a.points.empty() == !a.shape.empty())
        throw InvalidArgument("give exactly one of --points and --shape");
    if (!a.points.empty())
        set = read_point_set_file(a.points);
    else
        set = discretize_shape(parse_shape(a.shape), a.level);

    CapacityResult r;
    if (a.bruteforce)
    {
        r = capacity_bruteforce(set, a.beta, a.step);
    }
    else
    {
        CapacityOptions opt;
        opt.tol = a.tol;
        opt.max_iterations = a.max_iterations;
        r = capacity(set, a.beta, opt);
    }
    emit(format_capacity_result(r), a.out);
    return 0;
}

//---------------------------------------------------------------------------//
struct FractalArgs
{
    int d = 1;
    double p = 0.5;
    int k = 1;
    std::uint64_t seed = 1;
    std::string target;
    int partner_level = -1;
    std::string out;
    std::uint64_t index = 1;
    std::uint64_t trees = 10000;
};

int run_fractal_sample(FractalArgs const& a)
{
    PercolationParams const params{a.d, a.p, a.k};
    PercolationSample s;
    if (a.target.empty())
    {
        s = sample(params, a.seed);
    }
    else
    {
        std::optional<Box> partner;
        if (a.partner_level >= 0)
            partner = CenteredCube(a.d, a.partner_level).box();
        s = sample_pruned(params, a.seed, load_target(a.target, a.d), partner);
    }
    emit(format_sample(s), a.out);
    return 0;
}

int run_fractal_exact(FractalArgs const& a)
{
    PercolationParams const params{a.d, a.p, a.k};
    params.validate();
    double const v = hit_probability_exact(params, load_target(a.target, a.d));
    emit(format_double(v) + "\n", a.out);
    return 0;
}

int run_fractal_chain(FractalArgs const& a)
{
    PercolationParams const params{a.d, a.p, a.k};
    auto const r = chain_test(params, a.index, a.trees, a.seed);
    std::string text = "index=" + std::to_string(r.index) + "\ntrees=" + std::to_string(r.trees)
                       + "\nstatistic=" + format_double(r.statistic) + "\ndof=" + format_double(r.dof)
                       + "\np_value=" + format_double(r.p_value) + "\n";
    emit(text, a.out);
    return 0;
}

//---------------------------------------------------------------------------//
struct HitArgs
{
    int d = 1;
    double p = 0.5;
    double q = 0.5;
    int m = 1;
    int n = 1;
    std::string target;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::string method = "mc";
    unsigned workers = 1;
    bool header = true;
    bool explore = false;
    std::string out;
};

SumHitSpec hit_spec(HitArgs const& a)
{
    SumHitSpec spec{a.d, a.p, a.q, a.m, a.n, load_target(a.target, a.d)};
    spec.validate();
    if (!a.explore && !spec.parameters_valid())
        std::cerr << "warning: beta = -log2(2^d p q) = " << format_double(spec.beta())
                  << " with p, q vs 2^{-d}: outside the range where the capacity bounds apply\n";
    return spec;
}

int run_hit_sum(HitArgs const& a)
{
    SumHitSpec const spec = hit_spec(a);
    RunOptions opt;
    opt.workers = a.workers;
    EstimateResult r;
    switch (parse_estimate_method(a.method))
    {
        case EstimateMethod::mc:
            r = sum_hit_mc(spec, a.trials, a.seed, opt);
            break;
        case EstimateMethod::rao_blackwell:
            r = sum_hit_rao_blackwell(spec, a.trials, a.seed, opt);
            break;
        case EstimateMethod::exact_enum:
            r = sum_hit_exact_enum(spec);
            break;
    }
    std::string text;
    if (a.header)
        text += hit_csv_header() + "\n";
    text += hit_csv_row(spec, r) + "\n";
    emit(text, a.out);
    return 0;
}

int run_hit_pz(HitArgs const& a, std::string const& measure)
{
    SumHitSpec const spec = hit_spec(a);
    Measure mu;
    if (measure == "uniform")
        mu = Measure::uniform(spec.target);
    else if (measure == "equilibrium")
        mu = capacity(spec.target, spec.beta()).equilibrium;
    else
        throw InvalidArgument("measure must be uniform or equilibrium");
    auto const pz = paley_zygmund(spec, mu);
    emit("first_moment=" + format_double(pz.first_moment) + "\nsecond_moment="
             + format_double(pz.second_moment) + "\nbound=" + format_double(pz.bound) + "\n",
         a.out);
    return 0;
}

//---------------------------------------------------------------------------//
struct RangeArgs
{
    std::string kind = "srw";
    std::string kind2;
    int d = 5;
    double radius = 0;
    double radius2 = 0;
    double p = 0.5;
    int level = 1;
    double p2 = 0.5;
    int level2 = 1;
    std::string target;
    std::vector<std::string> xs;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out;
};

RandomSetSpec range_spec(std::string const& kind, int d, double radius, double p, int level,
                         double max_norm)
{
    switch (parse_random_set_kind(kind))
    {
        case RandomSetKind::srw_range:
            return RandomSetSpec::srw_range(d, radius > 0 ? radius : 8 * max_norm);
        case RandomSetKind::fractal_percolation:
            return RandomSetSpec::fractal_percolation({d, p, level});
        case RandomSetKind::branching_rw:
            throw InvalidArgument("branching random walk ranges are not supported");
    }
    throw InvalidArgument("unknown kind");
}

int run_randomset_hit(RangeArgs const& a)
{
    if (a.xs.empty())
        throw InvalidArgument("give at least one --x");
    PointSet const target = load_target(a.target, a.d);
    std::vector<LatticePoint> xs;
    double max_norm = 0;
    for (auto const& x : a.xs)
    {
        xs.push_back(parse_point(x, a.d));
        max_norm = std::max(max_norm, norm(xs.back()));
    }
    RunOptions opt;
    opt.workers = a.workers;
    auto const first = range_spec(a.kind, a.d, a.radius, a.p, a.level, max_norm);
    std::string text = range_csv_header() + "\n";
    if (a.kind2.empty())
    {
        auto const table = single_set_hit_check(first, target, xs, a.trials, a.seed, opt);
        for (auto const& row : table.rows)
            text += range_csv_row(first, nullptr, target, row) + "\n";
    }
    else
    {
        auto const second = range_spec(a.kind2, a.d, a.radius2 > 0 ? a.radius2 : a.radius, a.p2,
                                       a.level2, max_norm);
        auto const table = sum_of_ranges_hit(first, second, target, xs, a.trials, a.seed, opt);
        for (auto const& row : table.rows)
            text += range_csv_row(first, &second, target, row) + "\n";
    }
    emit(text, a.out);
    return 0;
}

int run_randomset_sample(RangeArgs const& a)
{
    auto const spec = range_spec(a.kind, a.d, a.radius, a.p, a.level, 1);
    emit(format_point_set(sample_random_set(spec, a.seed)), a.out);
    return 0;
}

//---------------------------------------------------------------------------//
struct ExperimentArgs
{
    std::string name;
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
    std::string output;
    std::string plot_dir;
    bool explore = false;
    bool quiet = false;
    std::string golden_dir;
};

ExperimentConfig build_config(ExperimentArgs const& a)
{
    ExperimentConfig c;
    if (!a.config.empty())
    {
        c = read_config_file(a.config);
        if (!a.name.empty() && parse_experiment_kind(a.name) != c.experiment)
            throw InvalidArgument("config file is for experiment " + std::string(to_string(c.experiment))
                                  + ", not " + a.name);
    }
    else
    {
        if (a.name.empty())
            throw InvalidArgument("give an experiment name or --config");
        c = ExperimentConfig::defaults(parse_experiment_kind(a.name));
    }
    for (auto const& kv : a.sets)
    {
        auto const eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("--set expects key=value, got '" + kv + "'");
        c.set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
    }
    if (a.seed)
        c.seed = *a.seed;
    if (a.trials)
        c.trials = *a.trials;
    if (a.workers)
        c.workers = *a.workers;
    if (!a.output.empty())
        c.output = a.output;
    if (a.explore)
        c.explore = true;
    return c;
}

int run_experiment_cmd(ExperimentArgs const& a)
{
    ExperimentConfig const c = build_config(a);
    ExperimentResult const r = run_experiment(c);
    emit(r.csv, c.output.string());
    if (!a.plot_dir.empty())
    {
        for (auto const& spec : default_plot_specs(c.experiment))
            emit_plot_data(r.csv, spec, a.plot_dir);
    }
    if (!a.quiet)
    {
        for (auto const& line : r.report)
            std::cerr << line << "\n";
    }
    for (auto const& line : r.failures)
        std::cerr << "ASSERTION FAILED: " << line << "\n";
    return r.exit_code();
}

int run_experiment_verify(ExperimentArgs const& a)
{
    auto const outcome = verify_golden(a.golden_dir, a.workers.value_or(1));
    for (auto const& name : outcome.matched)
        std::cerr << "match    " << name << "\n";
    for (auto const& name : outcome.mismatched)
        std::cerr << "MISMATCH " << name << "\n";
    if (outcome.matched.empty() && outcome.mismatched.empty())
        std::cerr << "no <name>.cfg / <name>.csv pairs in " << a.golden_dir << "\n";
    return outcome.passed() ? 0 : 2;
}

int run_experiment_config(ExperimentArgs const& a)
{
    emit(format_config(build_config(a)), a.output);
    return 0;
}

struct PlotArgs
{
    std::string csv;
    std::string experiment;
    std::string out_dir = ".";
};

int run_plot(PlotArgs const& a)
{
    std::string const csv = read_text_file(a.csv);
    for (auto const& spec : default_plot_specs(parse_experiment_kind(a.experiment)))
    {
        for (auto const& path : emit_plot_data(csv, spec, a.out_dir))
            std::cerr << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fracsum: capacities, fractal percolation and hitting probabilities of Minkowski sums"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fracsum 0.1.0");

    // cap
    CapArgs cap;
    auto* cap_cmd = app.add_subcommand("cap", "Riesz capacity and equilibrium measure of a point set");
    cap_cmd->add_option("--points", cap.points, "Point-set file");
    cap_cmd->add_option("--shape", cap.shape, "Shape spec to discretize, e.g. segment:-0.125;0.125");
    cap_cmd->add_option("--level", cap.level, "Discretization level k for --shape")->check(CLI::NonNegativeNumber);
    cap_cmd->add_option("--beta", cap.beta, "Kernel exponent")->required();
    cap_cmd->add_option("--tol", cap.tol, "Relative duality-gap tolerance");
    cap_cmd->add_option("--max-iterations", cap.max_iterations, "Frank-Wolfe iteration cap");
    cap_cmd->add_flag("--bruteforce", cap.bruteforce, "Grid search over the simplex (at most 6 points)");
    cap_cmd->add_option("--step", cap.step, "Grid step for --bruteforce");
    cap_cmd->add_option("-o,--out", cap.out, "Output file (default stdout)");

    // fractal
    FractalArgs fr;
    auto* fractal_cmd = app.add_subcommand("fractal", "Discrete fractal percolation");
    fractal_cmd->require_subcommand(1);
    auto add_common = [&fr](CLI::App* c) {
        c->add_option("--d", fr.d, "Dimension")->required();
        c->add_option("--p", fr.p, "Retention probability")->required();
        c->add_option("--k", fr.k, "Level")->required();
        c->add_option("-o,--out", fr.out, "Output file (default stdout)");
    };
    auto* fr_sample = fractal_cmd->add_subcommand("sample", "Sample Q_d(p;k)");
    add_common(fr_sample);
    fr_sample->add_option("--seed", fr.seed, "Seed");
    fr_sample->add_option("--target", fr.target, "Prune against this point-set file");
    fr_sample->add_option("--partner-level", fr.partner_level, "Prune with the partner box Delta_j");
    auto* fr_exact = fractal_cmd->add_subcommand("exact-hit", "Exact P(Q_d(p;k) meets target)");
    add_common(fr_exact);
    fr_exact->add_option("--target", fr.target, "Point-set file")->required();
    auto* fr_chain = fractal_cmd->add_subcommand("chain-test", "Chi-square test of the leaf chain");
    add_common(fr_chain);
    fr_chain->add_option("--index", fr.index, "Transition i -> i+1 (1-based)");
    fr_chain->add_option("--trees", fr.trees, "Number of sampled trees");
    fr_chain->add_option("--seed", fr.seed, "Seed");

    // hit
    HitArgs hit;
    std::string pz_measure = "equilibrium";
    auto* hit_cmd = app.add_subcommand("hit", "Hitting probabilities of Q_d(p;m) + Q_d(q;n)");
    hit_cmd->require_subcommand(1);
    auto add_hit = [&hit](CLI::App* c) {
        c->add_option("--d", hit.d, "Dimension")->required();
        c->add_option("--p", hit.p, "First retention probability")->required();
        c->add_option("--q", hit.q, "Second retention probability")->required();
        c->add_option("--m", hit.m, "First level")->required();
        c->add_option("--n", hit.n, "Second level")->required();
        c->add_option("--target", hit.target, "Target point-set file")->required();
        c->add_flag("--explore", hit.explore, "Silence the parameter-range warning");
        c->add_option("-o,--out", hit.out, "Output file (default stdout)");
    };
    auto* hit_sum = hit_cmd->add_subcommand("sum", "Estimate P((Q + Q') meets target)");
    add_hit(hit_sum);
    hit_sum->add_option("--trials", hit.trials, "Monte Carlo trials");
    hit_sum->add_option("--seed", hit.seed, "Seed");
    hit_sum->add_option("--method", hit.method, "mc, rb or exact")
        ->check(CLI::IsMember({"mc", "rb", "exact"}));
    hit_sum->add_option("--workers", hit.workers, "Worker threads (0 = all cores)");
    hit_sum->add_flag("!--no-header", hit.header, "Omit the CSV header line");
    auto* hit_pz = hit_cmd->add_subcommand("pz", "Paley-Zygmund lower bound");
    add_hit(hit_pz);
    hit_pz->add_option("--measure", pz_measure, "uniform or equilibrium")
        ->check(CLI::IsMember({"uniform", "equilibrium"}));

    // randomset
    RangeArgs rs;
    auto* rs_cmd = app.add_subcommand("randomset", "Random walk ranges and general random sets");
    rs_cmd->require_subcommand(1);
    auto add_rs = [&rs](CLI::App* c) {
        c->add_option("--kind", rs.kind, "srw or fractal");
        c->add_option("--d", rs.d, "Dimension");
        c->add_option("--radius", rs.radius, "Walk truncation radius (default 8 max|x|)");
        c->add_option("--p", rs.p, "Fractal retention probability");
        c->add_option("--level", rs.level, "Fractal level");
        c->add_option("--seed", rs.seed, "Seed");
        c->add_option("-o,--out", rs.out, "Output file (default stdout)");
    };
    auto* rs_hit = rs_cmd->add_subcommand("hit", "P(R meets x+A), or P((R_1+R_2) meets x+A) with --kind2");
    add_rs(rs_hit);
    rs_hit->add_option("--kind2", rs.kind2, "Second set kind (enables the sum)");
    rs_hit->add_option("--radius2", rs.radius2, "Second walk radius");
    rs_hit->add_option("--p2", rs.p2, "Second fractal retention probability");
    rs_hit->add_option("--level2", rs.level2, "Second fractal level");
    rs_hit->add_option("--target", rs.target, "Target point-set file (must contain 0)")->required();
    rs_hit->add_option("--x", rs.xs, "Shift, e.g. 8,0,0,0,0 (repeatable)")->required();
    rs_hit->add_option("--trials", rs.trials, "Monte Carlo trials per shift");
    rs_hit->add_option("--workers", rs.workers, "Worker threads (0 = all cores)");
    auto* rs_sample = rs_cmd->add_subcommand("sample", "Sample one random set");
    add_rs(rs_sample);

    // experiment
    ExperimentArgs ex;
    auto* ex_cmd = app.add_subcommand("experiment", "Parameter sweeps with assertions");
    ex_cmd->require_subcommand(1);
    auto add_ex = [&ex](CLI::App* c) {
        c->add_option("--config", ex.config, "Config file (key=value)");
        c->add_option("--set", ex.sets, "Override key=value (repeatable)");
        c->add_option("--seed", ex.seed, "Run seed");
        c->add_option("--trials", ex.trials, "Trials per cell");
        c->add_option("--workers", ex.workers, "Worker threads (0 = all cores)");
        c->add_option("-o,--output", ex.output, "CSV output file (default stdout)");
        c->add_flag("--explore", ex.explore, "Skip preconditions and assertions");
    };
    auto* ex_run = ex_cmd->add_subcommand("run", "Run an experiment");
    ex_run->add_option("name", ex.name, "fp_cap_ratio, main_band, cap_compare, pz_diag or srw_band");
    add_ex(ex_run);
    ex_run->add_option("--plot-dir", ex.plot_dir, "Also write plot data files here");
    ex_run->add_flag("-q,--quiet", ex.quiet, "Do not print the summary report");
    auto* ex_verify = ex_cmd->add_subcommand("verify", "Compare reruns against golden CSVs");
    ex_verify->add_option("golden_dir", ex.golden_dir, "Directory of <name>.cfg/<name>.csv pairs")->required();
    ex_verify->add_option("--workers", ex.workers, "Worker threads");
    auto* ex_config = ex_cmd->add_subcommand("config", "Print the effective config");
    ex_config->add_option("name", ex.name, "Experiment name");
    add_ex(ex_config);

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Write plot data files from an experiment CSV");
    plot_cmd->add_option("--csv", plot.csv, "Experiment CSV")->required();
    plot_cmd->add_option("--experiment", plot.experiment, "Experiment that produced the CSV")->required();
    plot_cmd->add_option("--out-dir", plot.out_dir, "Output directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try
    {
        if (cap_cmd->parsed())
            return run_cap(cap);
        if (fr_sample->parsed())
            return run_fractal_sample(fr);
        if (fr_exact->parsed())
            return run_fractal_exact(fr);
        if (fr_chain->parsed())
            return run_fractal_chain(fr);
        if (hit_sum->parsed())
            return run_hit_sum(hit);
        if (hit_pz->parsed())
            return run_hit_pz(hit, pz_measure);
        if (rs_hit->parsed())
            return run_randomset_hit(rs);
        if (rs_sample->parsed())
            return run_randomset_sample(rs);
        if (ex_run->parsed())
            return run_experiment_cmd(ex);
        if (ex_verify->parsed())
            return run_experiment_verify(ex);
        if (ex_config->parsed())
            return run_experiment_config(ex);
        if (plot_cmd->parsed())
            return run_plot(plot);
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
