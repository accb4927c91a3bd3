#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ballquad/assemble.hpp"
#include "ballquad/errors.hpp"
#include "ballquad/io.hpp"
#include "ballquad/kdtree.hpp"
#include "ballquad/nodegen.hpp"
#include "ballquad/oracle.hpp"

namespace ballquad::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct BallFlags {
    double rho = unit_volume_radius();
    std::vector<double> center{0.0, 0.0, 0.0};

    void add(CLI::App& app)
    {
        app.add_option("--rho", rho, "ball radius (default: unit volume)")->check(CLI::PositiveNumber);
        app.add_option("--center", center, "ball centre x y z")->expected(3);
    }
    Ball ball() const { return {{center[0], center[1], center[2]}, rho}; }
};

struct ParamFlags {
    WeightParams params;
    bool nondeterministic = false;

    void add(CLI::App& app)
    {
        app.add_option("--m", params.m, "polynomial degree")->capture_default_str();
        app.add_option("--n", params.n, "stencil size (default (m+1)(m+2)(m+3))");
        app.add_option("--p", params.p, "kernel r^(2p+1)")->capture_default_str();
        app.add_option("--q-lambda1", params.q_lambda1, "Gauss order in lambda1")->capture_default_str();
        app.add_option("--q-sliver", params.q_sliver, "sliver quadrature order")->capture_default_str();
        app.add_option("--threads", params.threads, "worker threads (0: BALLQUAD_THREADS or all cores)");
        app.add_flag("--nondeterministic", nondeterministic, "per-thread partial sums instead of ordered scatter");
    }
    WeightParams get() const
    {
        WeightParams p = params;
        p.deterministic_reduction = !nondeterministic;
        if (p.threads == 0) {
            if (const char* env = std::getenv("BALLQUAD_THREADS")) {
                try {
                    p.threads = static_cast<unsigned>(std::stoul(env));
                } catch (const std::exception&) {
                    throw ValidationError(std::string("BALLQUAD_THREADS is not a number: ") + env);
                }
            }
        }
        return p;
    }
};

// Median nearest-neighbour distance.
double spacing_estimate(const NodeSet& nodes)
{
    if (nodes.size() < 2) {
        return 0.0;
    }
    const KdTree tree(nodes.points);
    std::vector<double> d;
    d.reserve(nodes.size());
    for (const Point3& p : nodes.points) {
        const auto nn = tree.knn(p, 2);
        d.push_back(distance(p, nodes.points[nn[1]]));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2];
}

QuadratureRule rule_from_file(const WeightsFile& wf)
{
    QuadratureRule rule;
    rule.nodes.ball = wf.ball;
    rule.nodes.points = wf.points;
    rule.nodes.on_surface.assign(wf.points.size(), 0);
    rule.W = wf.W;
    return rule;
}

template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot open " + path + " for writing");
    }
    fn(f);
    if (!f) {
        throw IoError("write failed: " + path);
    }
}

std::string fmt(double v)
{
    return format_double(v);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"ballquad: quadrature weights for the ball from scattered nodes"};
    app.require_subcommand(1);
    // "-h" stays free for the halton spacing flag.
    app.set_help_flag("--help", "print help");

    // nodes
    auto* nodes_cmd = app.add_subcommand("nodes", "generate a node set");
    std::string family = "quasi";
    std::size_t target_n = 0;
    double h = 0.0;
    std::uint64_t seed = 0;
    std::string output;
    BallFlags nodes_ball;
    nodes_cmd->add_option("--family", family, "quasi | halton | clustered")->capture_default_str();
    auto* opt_n = nodes_cmd->add_option("--N", target_n, "approximate node count");
    auto* opt_h = nodes_cmd->add_option("--h", h, "spacing (halton only)")->check(CLI::PositiveNumber);
    opt_n->excludes(opt_h);
    nodes_cmd->add_option("--seed", seed, "seed")->capture_default_str();
    nodes_cmd->add_option("-o,--output", output, "node file")->required();
    nodes_ball.add(*nodes_cmd);

    // weights
    auto* weights_cmd = app.add_subcommand("weights", "compute quadrature weights for a node file");
    std::string nodes_path;
    std::string weights_out;
    ParamFlags weights_params;
    weights_cmd->add_option("--nodes", nodes_path, "node file")->required();
    weights_cmd->add_option("-o,--output", weights_out, "weights file")->required();
    weights_params.add(*weights_cmd);

    // integrate
    auto* integrate_cmd = app.add_subcommand("integrate", "apply a weights file");
    std::string weights_path;
    std::string integrand_name;
    std::string samples_path;
    bool no_reference = false;
    integrate_cmd->add_option("--weights", weights_path, "weights file")->required();
    auto* opt_int = integrate_cmd->add_option("--integrand", integrand_name, "f1[:seed] | f2 | f3 | f4 | const[:v] | poly:seed:deg");
    auto* opt_samples = integrate_cmd->add_option("--samples", samples_path, "file with one value per node");
    opt_int->excludes(opt_samples);
    integrate_cmd->add_flag("--no-reference", no_reference, "skip the reference value");

    // convergence
    auto* conv_cmd = app.add_subcommand("convergence", "error against N as CSV");
    std::string conv_family = "quasi";
    std::vector<std::size_t> conv_n;
    std::string conv_integrand = "f2";
    std::size_t rotations = 0;
    std::uint64_t conv_seed = 0;
    std::string conv_out;
    ParamFlags conv_params;
    BallFlags conv_ball;
    conv_cmd->add_option("--family", conv_family, "quasi | halton | clustered")->capture_default_str();
    conv_cmd->add_option("--N", conv_n, "node counts")->required()->delimiter(',');
    conv_cmd->add_option("--integrand", conv_integrand, "integrand name")->capture_default_str();
    conv_cmd->add_option("--rotations", rotations, "random rotations (max error reported)")->capture_default_str();
    conv_cmd->add_option("--seed", conv_seed, "seed for nodes and rotations")->capture_default_str();
    conv_cmd->add_option("-o,--output", conv_out, "CSV file (default stdout)");
    conv_params.add(*conv_cmd);
    conv_ball.add(*conv_cmd);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "weight computation time against N as CSV");
    std::string bench_family = "quasi";
    std::vector<std::size_t> bench_n;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    ParamFlags bench_params;
    BallFlags bench_ball;
    bench_cmd->add_option("--family", bench_family, "quasi | halton | clustered")->capture_default_str();
    bench_cmd->add_option("--N", bench_n, "node counts")->required()->delimiter(',');
    bench_cmd->add_option("--seed", bench_seed, "seed")->capture_default_str();
    bench_cmd->add_option("-o,--output", bench_out, "CSV file (default stdout)");
    bench_params.add(*bench_cmd);
    bench_ball.add(*bench_cmd);

    // f1-coeffs
    auto* coeffs_cmd = app.add_subcommand("f1-coeffs", "print the seeded f1 coefficients");
    std::uint64_t coeff_seed = 0;
    int coeff_degree = 30;
    coeffs_cmd->add_option("--seed", coeff_seed, "seed")->capture_default_str();
    coeffs_cmd->add_option("--degree", coeff_degree, "total degree")->capture_default_str()->check(
        CLI::NonNegativeNumber);

    // tessellate
    auto* tess_cmd = app.add_subcommand("tessellate", "dump the Delaunay tessellation of a node file");
    std::string tess_nodes;
    std::string tess_out;
    tess_cmd->add_option("--nodes", tess_nodes, "node file")->required();
    tess_cmd->add_option("-o,--output", tess_out, "output (default stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << sub->help();
        } else {
            err << app.help();
        }
        return 2;
    }

    try {
        if (nodes_cmd->parsed()) {
            const NodeFamily fam = parse_family(family);
            const Ball ball = nodes_ball.ball();
            NodeSet nodes;
            if (opt_h->count() > 0) {
                if (fam != NodeFamily::halton) {
                    throw ValidationError("--h is only supported for --family halton; use --N");
                }
                nodes = halton_node_set(h, ball);
            } else if (opt_n->count() > 0) {
                if (target_n < 4) {
                    throw ValidationError("--N must be at least 4");
                }
                nodes = make_family_nodes(fam, target_n, ball, seed);
            } else {
                throw ValidationError("one of --N or --h is required");
            }
            write_nodes(output, nodes);
            out << "N " << nodes.size() << " surface " << nodes.surface_count() << " h " << fmt(nodes.h)
                << " median_nn " << fmt(spacing_estimate(nodes)) << '\n';
        } else if (weights_cmd->parsed()) {
            const WeightParams params = weights_params.get();
            validate_params(params, 0);
            const NodeSet nodes = read_nodes(nodes_path);
            validate_params(params, nodes.size());
            const auto t0 = Clock::now();
            const QuadratureRule rule = compute_weights(nodes, params);
            const double secs = seconds_since(t0);
            write_weights(weights_out, rule);
            const double sum = rule.sum();
            const double vol = nodes.domain == DomainKind::ball ? nodes.ball.volume() : std::nan("");
            out << "N " << nodes.size() << " tets " << rule.stats.tets << " sum_W " << fmt(sum) << " volume_defect "
                << fmt(std::abs(sum - vol)) << " seconds " << fmt(secs) << '\n';
            if (rule.stats.stencils_missing_vertices > 0) {
                err << "warning: " << rule.stats.stencils_missing_vertices
                    << " stencils do not contain all vertices of their tetrahedron\n";
            }
        } else if (integrate_cmd->parsed()) {
            const QuadratureRule rule = rule_from_file(read_weights(weights_path));
            if (!samples_path.empty()) {
                const std::vector<double> samples = read_samples(samples_path);
                const double value = apply_rule(rule, samples);
                out << "value " << fmt(value) << '\n';
            } else if (!integrand_name.empty()) {
                const TestIntegrand f = TestIntegrand::parse(integrand_name).centred_at(rule.nodes.ball.center);
                const double value = apply_rule(rule, f);
                std::ostringstream line;
                line << "value " << fmt(value);
                if (!no_reference) {
                    const double ref = reference_value(f, rule.nodes.ball);
                    line << " reference " << fmt(ref) << " error " << fmt(std::abs(value - ref));
                }
                out << line.str() << '\n';
            } else {
                throw ValidationError("one of --integrand or --samples is required");
            }
        } else if (conv_cmd->parsed()) {
            const WeightParams params = conv_params.get();
            validate_params(params, 0);
            const TestIntegrand f = TestIntegrand::parse(conv_integrand);
            const auto rows = convergence_study(parse_family(conv_family), conv_n, params, f, rotations, conv_seed,
                                                conv_ball.ball());
            with_output(conv_out, out, [&](std::ostream& o) { write_convergence_csv(o, rows); });
            if (rows.size() >= 2) {
                std::vector<double> x, y;
                for (const auto& r : rows) {
                    x.push_back(static_cast<double>(r.N));
                    y.push_back(std::max(r.error, 1e-300));
                }
                (conv_out.empty() ? err : out) << "slope " << fmt(loglog_slope(x, y)) << '\n';
            }
        } else if (bench_cmd->parsed()) {
            const WeightParams params = bench_params.get();
            validate_params(params, 0);
            const Ball ball = bench_ball.ball();
            std::vector<ConvergenceRow> rows;
            for (std::size_t target : bench_n) {
                const NodeSet nodes = make_family_nodes(parse_family(bench_family), target, ball, bench_seed);
                const auto t0 = Clock::now();
                const QuadratureRule rule = compute_weights(nodes, params);
                rows.push_back({nodes.size(), std::abs(rule.sum() - ball.volume()), seconds_since(t0)});
            }
            with_output(bench_out, out, [&](std::ostream& o) { write_convergence_csv(o, rows); });
            if (rows.size() >= 2) {
                std::vector<double> x, y;
                for (const auto& r : rows) {
                    x.push_back(static_cast<double>(r.N));
                    y.push_back(r.seconds);
                }
                (bench_out.empty() ? err : out) << "exponent " << fmt(loglog_slope(x, y)) << '\n';
            }
        } else if (coeffs_cmd->parsed()) {
            const PolyCoefficients c = PolyCoefficients::seeded(coeff_seed, coeff_degree);
            for (int a = 0; a <= coeff_degree; ++a) {
                for (int b = 0; b <= a; ++b) {
                    for (int g = 0; g <= a - b; ++g) {
                        out << a << ' ' << b << ' ' << g << ' ' << fmt(c.at(a, b, g)) << '\n';
                    }
                }
            }
        } else if (tess_cmd->parsed()) {
            const NodeSet nodes = read_nodes(tess_nodes);
            const Tessellation tess = delaunay3(nodes);
            with_output(tess_out, out, [&](std::ostream& o) { write_tessellation(o, tess); });
            if (!tess_out.empty() && tess_out != "-") {
                out << "tets " << tess.size() << " boundary_faces " << tess.boundary_faces.size() << '\n';
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace ballquad::cli
