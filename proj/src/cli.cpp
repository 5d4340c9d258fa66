#include "hyperlap/cli.hpp"
#include "hyperlap/control.hpp"
#include "hyperlap/dynamics.hpp"
#include "hyperlap/error.hpp"
#include "hyperlap/io.hpp"
#include "hyperlap/spectral.hpp"
#include "hyperlap/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

namespace hyperlap::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

double parse_q(const std::string& s)
{
    if (s == "inf" || s == "INF")
        return kInf;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw UsageError("--q expects a number or inf, got '" + s + "'");
}

json q_to_json(double q)
{
    return std::isinf(q) ? json("inf") : json(q);
}

std::string fmt_g(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Common
{
    std::string input;
    std::string out;
    std::optional<double> p, lambda, T, M, tol;
    std::string q;
    std::optional<int> steps, max_iters;

    void add_overrides(CLI::App* app)
    {
        app->add_option("--p", p, "override exponent p");
        app->add_option("--q", q, "override clique exponent q (number or inf)");
        app->add_option("--lambda", lambda, "override penalty parameter");
        app->add_option("--T", T, "override horizon");
        app->add_option("--steps", steps, "override number of time steps");
        app->add_option("--M", M, "override control budget");
        app->add_option("--tol", tol, "override optimizer tolerance");
        app->add_option("--max-iters", max_iters, "override optimizer iteration cap");
    }

    io::Overrides overrides() const
    {
        io::Overrides ov;
        ov.p = p;
        if (!q.empty())
            ov.q = parse_q(q);
        ov.lambda = lambda;
        ov.T = T;
        ov.steps = steps;
        ov.M = M;
        ov.tol = tol;
        ov.max_iters = max_iters;
        return ov;
    }
};

json opt_result_json(const ControlProblem& pb, const OptResult& r, double J_original)
{
    double free_adj = 0.0, lam_gamma = 0.0;
    for (const Eigen::VectorXd& g : r.gamma) {
        free_adj = std::max(free_adj, g.head(pb.G.n()).norm());
        lam_gamma = std::max(lam_gamma, pb.lambda * g.norm());
    }
    json hist = json::array();
    for (double c : r.cost_history)
        hist.push_back(c);
    const double ratio = r.budget_usage / pb.M;
    return {{"p", pb.params.p},
            {"q", q_to_json(pb.params.q)},
            {"lambda", pb.lambda},
            {"T", pb.grid.T},
            {"steps", pb.grid.K},
            {"M", pb.M},
            {"J", r.cost_history.back()},
            {"J_original", J_original},
            {"cost_history", hist},
            {"residual", r.residual},
            {"budget_usage", r.budget_usage},
            {"budget_ratio", ratio},
            {"certificate_applicable", ratio <= 0.99},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"free_adjoint_sup", free_adj},
            {"lambda_gamma_sup", lam_gamma}};
}

double original_cost(const ControlProblem& pb, const Path& a)
{
    Trajectory orig = solve_constrained(pb.G, pb.params.p, a, pb.h, initial_state(pb, a), pb.grid);
    return cost_J(pb, a, orig);
}

void write_opt_files(const std::string& dir, const ControlProblem& pb, const OptResult& r, const json& result)
{
    io::write_file_atomic((fs::path(dir) / "result.json").string(), io::dump_json(result));
    io::write_file_atomic((fs::path(dir) / "control.csv").string(), io::path_csv(pb.grid, r.a, "a"));
    io::write_file_atomic((fs::path(dir) / "trajectory.csv").string(), io::path_csv(pb.grid, r.x.x, "x"));
    io::write_file_atomic((fs::path(dir) / "adjoint.csv").string(), io::path_csv(pb.grid, r.gamma, "gamma"));
}

int cmd_validate(const std::string& path, std::ostream& out)
{
    Hypergraph g = io::load_hypergraph(path);
    json j = {{"n", g.n()}, {"m", g.m()}, {"N", g.N()}, {"edges", static_cast<int>(g.edges().size())},
              {"nu_E", nu_E(g)}, {"connected", is_connected(g)}};
    j["diameter"] = is_connected(g) ? json(diameter(g)) : json(nullptr);
    out << io::dump_json(j);
    return 0;
}

int cmd_energy(const std::string& path, double p, const std::string& qs, const std::string& xarg, std::ostream& out)
{
    Hypergraph g = io::load_hypergraph(path);
    const double q = qs.empty() ? p : parse_q(qs);
    json xj = (!xarg.empty() && xarg.front() == '[') ? io::parse_json(xarg, "--x") : io::load_json(xarg);
    Eigen::VectorXd x = io::vector_from_json(xj, "x");
    if (x.size() != g.N())
        throw Error("energy", "DimensionMismatch", "x must have N = " + std::to_string(g.N()) + " entries");
    json j = {{"p", p}, {"q", q_to_json(q)}, {"phi_p", phi_p(g, p, x)}, {"phi_pq", phi_pq(g, {p, q}, x)},
              {"subgradient", io::vector_to_json(subdiff_face(g, p, x).eta)}};
    if (std::isfinite(q) && p > 1.0 && q > 1.0)
        j["gradient"] = io::vector_to_json(grad_phi_pq(g, {p, q}, x));
    out << io::dump_json(j);
    return 0;
}

int cmd_simulate(const Common& c, const std::string& scheme, std::ostream& out)
{
    io::ProblemFile pf = io::load_problem(c.input, c.overrides());
    Trajectory tr;
    if (scheme == "penalized")
        tr = solve_penalized(pf.G, pf.params, pf.lambda, pf.a, pf.h, pf.x0, pf.grid);
    else if (scheme == "constrained")
        tr = solve_constrained(pf.G, pf.params.p, pf.a, pf.h, pf.x0, pf.grid);
    else
        tr = solve_free(pf.G, pf.params, pf.x0, pf.grid);
    const std::string csv = io::path_csv(pf.grid, tr.x, "x");
    if (c.out.empty()) {
        out << csv;
        return 0;
    }
    io::write_file_atomic((fs::path(c.out) / "trajectory.csv").string(), csv);
    json summary = {{"scheme", scheme},
                    {"p", pf.params.p},
                    {"q", q_to_json(pf.params.q)},
                    {"lambda", pf.lambda},
                    {"T", pf.grid.T},
                    {"steps", pf.grid.K},
                    {"constraint_violation", scheme == "free" ? json(nullptr) : json(constraint_violation(pf.G, tr, pf.a))},
                    {"final_state", io::vector_to_json(tr.x.back())}};
    io::write_file_atomic((fs::path(c.out) / "summary.json").string(), io::dump_json(summary));
    out << io::dump_json(summary);
    return 0;
}

int cmd_control(const Common& c, std::ostream& out)
{
    io::ProblemFile pf = io::load_problem(c.input, c.overrides());
    ControlProblem pb = io::to_control_problem(pf);
    OptResult r = optimize(pb, pf.a, pf.opt);
    json result = opt_result_json(pb, r, original_cost(pb, r.a));
    write_opt_files(c.out, pb, r, result);
    out << io::dump_json(result);
    return 0;
}

int cmd_sweep(const Common& c, const std::vector<double>& qs, const std::vector<double>& lams, std::ostream& out)
{
    if (qs.empty() || qs.size() != lams.size())
        throw UsageError("--q-list and --lambda-list must be non-empty and of equal length");
    io::ProblemFile pf = io::load_problem(c.input, c.overrides());
    ControlProblem pb = io::to_control_problem(pf);
    std::vector<SweepPoint> schedule;
    for (std::size_t i = 0; i < qs.size(); ++i)
        schedule.push_back({qs[i], lams[i]});
    SweepReport rep = sweep_to_original(pb, schedule, pf.a, pf.opt);

    json stages = json::array();
    for (std::size_t i = 0; i < rep.stages.size(); ++i) {
        const SweepStage& st = rep.stages[i];
        ControlProblem stage_pb = pb;
        stage_pb.params.q = st.q;
        stage_pb.lambda = st.lambda;
        const std::string sub = "q" + fmt_g(st.q) + "_lambda" + fmt_g(st.lambda);
        json result = opt_result_json(stage_pb, st.opt, st.J_original);
        write_opt_files((fs::path(c.out) / sub).string(), stage_pb, st.opt, result);
        double sup_a = 0.0;
        for (const Eigen::VectorXd& v : st.opt.a)
            sup_a = std::max(sup_a, v.norm());
        stages.push_back({{"dir", sub},
                          {"q", st.q},
                          {"lambda", st.lambda},
                          {"J_penalized", st.J_penalized},
                          {"J_original", st.J_original},
                          {"residual", st.opt.residual},
                          {"budget_usage", st.opt.budget_usage},
                          {"iterations", st.opt.iterations},
                          {"converged", st.opt.converged},
                          {"control_sup", sup_a},
                          {"free_adjoint_sup", st.free_adjoint_norm},
                          {"lambda_gamma_sup", st.lambda_gamma_sup}});
    }
    json dist = json::array();
    bool decreasing = true, nonincreasing = true;
    for (std::size_t i = 0; i < rep.distances.size(); ++i) {
        dist.push_back(rep.distances[i]);
        if (i > 0 && rep.distances[i] > 1.2 * rep.distances[i - 1])
            decreasing = false;
    }
    for (std::size_t i = 1; i < rep.stages.size(); ++i)
        if (rep.stages[i].J_original > rep.stages[i - 1].J_original + 1e-3)
            nonincreasing = false;
    json summary = {{"stages", stages},
                    {"distances", dist},
                    {"distances_decreasing", decreasing},
                    {"J_original_nonincreasing", nonincreasing}};
    io::write_file_atomic((fs::path(c.out) / "summary.json").string(), io::dump_json(summary));
    out << io::dump_json(summary);
    return 0;
}

json eigen_json(const EigenResult& e)
{
    return {{"lambda1q", e.lambda1q}, {"zeta", io::vector_to_json(e.zeta)}, {"restarts", e.restarts},
            {"residual", e.residual}};
}

int cmd_spectral(const std::string& path, double p, const std::string& qs, double lambda, std::uint64_t seed,
                 int samples, const std::string& out_file, std::ostream& out)
{
    Hypergraph g = io::load_hypergraph(path);
    const double q = qs.empty() ? p : parse_q(qs);
    const EnergyParams prm{p, q};
    PoincareConstants pc = poincare_constants(g, p);
    KappaBounds kb = kappa_bounds(g, p);
    EigenOptions eo;
    eo.seed = seed;
    EigenResult ref = eigen_first_positive(g, {p, 512.0}, eo);
    eo.extra_starts = {ref.zeta};
    EigenResult eig = eigen_first_positive(g, prm, eo);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    json gaps = json::array();
    json yos = json::array();
    const double nu = pc.nu_E;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(g.N());
        for (int i = 0; i < g.N(); ++i)
            x[i] = normal(rng);
        Eigen::VectorXd rp = resolvent_p(g, p, lambda, x);
        const double gap = (rp - resolvent_pq(g, prm, lambda, x)).squaredNorm();
        const double bound = lambda * kb.kappa * (std::pow(nu, p / q) - 1.0) * std::pow(x.norm(), p);
        gaps.push_back({{"x", io::vector_to_json(x)}, {"gap_sq", gap}, {"bound", bound}});
        if (s == 0) {
            // Yosida approximations along the coupled schedule, reported only
            for (double l : {lambda, lambda / 10.0}) {
                const double qq = std::max(2.0, yosida_schedule_q(nu, p, l, 0.5));
                Eigen::VectorXd A = yosida(g, p, qq, l, x);
                Eigen::VectorXd Ap = yosida(g, p, kInf, l, x);
                yos.push_back({{"lambda", l}, {"q", qq}, {"yosida_pq", io::vector_to_json(A)},
                               {"yosida_p", io::vector_to_json(Ap)}, {"gap_sq", (A - Ap).squaredNorm()},
                               {"bound", std::pow(l, 0.5) * kb.kappa * std::pow(x.norm(), p)}});
            }
        }
    }
    json j = {{"p", p},
              {"q", q_to_json(q)},
              {"lambda", lambda},
              {"seed", seed},
              {"poincare", {{"gamma", pc.gamma}, {"Gamma", pc.Gamma}, {"nu_E", pc.nu_E}, {"diam", pc.diam}}},
              {"kappa", {{"kappa", kb.kappa}, {"kappa_prime", kb.kappa_prime}}},
              {"eigen", eigen_json(eig)},
              {"eigen_reference_q512", eigen_json(ref)},
              {"resolvent_gaps", gaps},
              {"yosida_schedule", yos}};
    const std::string text = io::dump_json(j);
    if (!out_file.empty())
        io::write_file_atomic(out_file, text);
    out << text;
    return 0;
}

int cmd_verify(const std::string& path, double p, const std::string& qs, std::uint64_t seed, int samples,
               std::ostream& out, std::ostream& err)
{
    Hypergraph g = io::load_hypergraph(path);
    const double q = qs.empty() ? p : parse_q(qs);
    std::vector<CheckRow> rows = run_invariant_suite(g, {p, q}, {seed, samples});
    out << format_report(rows);
    const long failed = std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; });
    if (failed > 0) {
        err << "cli/VerifyFailed: " << failed << " of " << rows.size() << " checks failed\n";
        return 1;
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Hypergraph p-Laplacian evolution, clique expansion and optimal control"};
    app.require_subcommand(1);

    std::string graph_path, x_arg, q_str, out_file;
    double p = 2.0, lambda = 0.5;
    std::uint64_t seed = 0;
    int samples = 100;
    int gap_samples = 10;
    std::string scheme = "penalized";
    std::vector<double> q_list, lambda_list;
    Common common;

    auto* validate = app.add_subcommand("validate", "check a hypergraph file");
    validate->add_option("graph", graph_path, "hypergraph JSON")->required();

    auto* energy = app.add_subcommand("energy", "evaluate energies and gradient at x");
    energy->add_option("graph", graph_path, "hypergraph JSON")->required();
    energy->add_option("--p", p, "exponent p")->required();
    energy->add_option("--q", q_str, "clique exponent q (number or inf; default p)");
    energy->add_option("--x", x_arg, "vector file or inline JSON array")->required();

    auto* simulate = app.add_subcommand("simulate", "integrate one of the evolution problems");
    simulate->add_option("problem", common.input, "problem JSON")->required();
    simulate->add_option("--scheme", scheme, "penalized | constrained | free")
        ->check(CLI::IsMember({"penalized", "constrained", "free"}));
    simulate->add_option("--out", common.out, "output directory (default: CSV on stdout)");
    common.add_overrides(simulate);

    auto* control = app.add_subcommand("control", "solve the penalized optimal control problem");
    control->add_option("problem", common.input, "problem JSON")->required();
    control->add_option("--out", common.out, "output directory (default control_out)");
    common.add_overrides(control);

    auto* sweep = app.add_subcommand("sweep", "optimal controls along a (q, lambda) schedule");
    sweep->add_option("problem", common.input, "problem JSON")->required();
    sweep->add_option("--q-list", q_list, "comma-separated q values")->required()->delimiter(',');
    sweep->add_option("--lambda-list", lambda_list, "comma-separated lambda values")->required()->delimiter(',');
    sweep->add_option("--out", common.out, "output directory (default sweep_out)");
    common.add_overrides(sweep);

    auto* spectral = app.add_subcommand("spectral", "Poincare constants, resolvents and first eigenvalue");
    spectral->add_option("graph", graph_path, "hypergraph JSON")->required();
    spectral->add_option("--p", p, "exponent p")->required();
    spectral->add_option("--q", q_str, "clique exponent q (default p)");
    spectral->add_option("--lambda", lambda, "resolvent parameter")->capture_default_str();
    spectral->add_option("--seed", seed, "random seed")->capture_default_str();
    spectral->add_option("--samples", gap_samples, "resolvent gap samples")->capture_default_str();
    spectral->add_option("--out", out_file, "also write the report to this file");

    auto* verify = app.add_subcommand("verify", "run the invariant suite on a hypergraph");
    verify->add_option("graph", graph_path, "hypergraph JSON")->required();
    verify->add_option("--p", p, "exponent p")->required();
    verify->add_option("--q", q_str, "clique exponent q (default p)");
    verify->add_option("--seed", seed, "random seed")->capture_default_str();
    verify->add_option("--samples", samples, "random samples per check")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*validate)
            return cmd_validate(graph_path, out);
        if (*energy)
            return cmd_energy(graph_path, p, q_str, x_arg, out);
        if (*simulate)
            return cmd_simulate(common, scheme, out);
        if (*control) {
            if (common.out.empty())
                common.out = "control_out";
            return cmd_control(common, out);
        }
        if (*sweep) {
            if (common.out.empty())
                common.out = "sweep_out";
            return cmd_sweep(common, q_list, lambda_list, out);
        }
        if (*spectral)
            return cmd_spectral(graph_path, p, q_str, lambda, seed, std::max(gap_samples, 0), out_file, out);
        if (*verify)
            return cmd_verify(graph_path, p, q_str, seed, samples, out, err);
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "io/SchemaError: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io/WriteFailed: " << e.what() << "\n";
        return 1;
    }
    err << "usage: no subcommand given\n";
    return 2;
}

} // namespace hyperlap::cli
