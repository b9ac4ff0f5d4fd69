#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "xppn/bench.hpp"
#include "xppn/benders.hpp"
#include "xppn/common.hpp"
#include "xppn/model_ir.hpp"
#include "xppn/render.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw xppn::ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw xppn::ValidationError("cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"XPPN solver toolkit: routes through convex neighborhoods and polygonal "
                 "chains with free entry and exit points"};
    app.require_subcommand(1);

    // generate ---------------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "write a random instance");
    int g_size = 5, g_radii = 1, g_mode = 1;
    std::uint64_t g_seed = 1;
    std::string g_out;
    gen->add_option("--size", g_size, "number of elements")->check(CLI::Range(2, 1000));
    gen->add_option("--radii", g_radii, "radius class 1..4")->check(CLI::Range(1, 4));
    gen->add_option("--mode", g_mode, "element mix 1..4")->check(CLI::Range(1, 4));
    gen->add_option("--seed", g_seed, "random seed");
    gen->add_option("--out", g_out, "output path")->required();

    // solve ------------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve an instance file");
    std::string s_instance, s_method = "benders", s_out, s_log;
    double s_eps = -1.0, s_time_limit = 7200.0;
    std::uint64_t s_seed = 1;
    solve->add_option("--instance", s_instance, "instance path")->required();
    solve->add_option("--method", s_method, "heuristic or benders")
        ->check(CLI::IsMember({"heuristic", "benders"}));
    solve->add_option("--eps", s_eps, "absolute bound-gap target (default scale-free)");
    solve->add_option("--time-limit", s_time_limit, "seconds");
    solve->add_option("--seed", s_seed, "solver seed");
    solve->add_option("--out", s_out, "solution output path")->required();
    solve->add_option("--log", s_log, "iteration log path (exact method)");

    // export-model -----------------------------------------------------------
    auto* exp = app.add_subcommand("export-model", "compile an instance to a model file");
    std::string e_instance, e_formulation = "mtz", e_out;
    exp->add_option("--instance", e_instance, "instance path")->required();
    exp->add_option("--formulation", e_formulation, "mtz, sec, ssec or time")
        ->check(CLI::IsMember({"mtz", "sec", "ssec", "time"}));
    exp->add_option("--out", e_out, "model output path")->required();

    // render -----------------------------------------------------------------
    auto* ren = app.add_subcommand("render", "draw an instance and its solution as SVG");
    std::string r_instance, r_solution, r_out;
    ren->add_option("--instance", r_instance, "instance path")->required();
    ren->add_option("--solution", r_solution, "solution path")->required();
    ren->add_option("--out", r_out, "SVG output path")->required();

    // bench ------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run the benchmark grid to CSV");
    std::vector<int> b_sizes = {5}, b_radii = {1, 2, 3, 4}, b_modes = {1, 2, 3, 4};
    int b_seeds = 5, b_workers = 0;
    double b_eps = -1.0, b_time_limit = 7200.0;
    std::string b_out, b_profile;
    bench->add_option("--sizes", b_sizes, "instance sizes")->delimiter(',');
    bench->add_option("--radii", b_radii, "radius classes")->delimiter(',');
    bench->add_option("--modes", b_modes, "element modes")->delimiter(',');
    bench->add_option("--seeds", b_seeds, "seeds per cell")->check(CLI::Range(1, 1000));
    bench->add_option("--eps", b_eps, "bound-gap target");
    bench->add_option("--time-limit", b_time_limit, "seconds per run");
    bench->add_option("--workers", b_workers, "worker threads (0 = auto)");
    bench->add_option("--out", b_out, "CSV output path")->required();
    bench->add_option("--profile-out", b_profile, "performance profile CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            xppn::Instance inst = xppn::generate(g_size, g_radii, g_mode, g_seed);
            spill(g_out, xppn::write_instance(inst));
            return 0;
        }

        if (*solve) {
            xppn::Instance inst = xppn::read_instance(slurp(s_instance));
            auto [reduced, reduction] = xppn::preprocess(inst);
            if (s_method == "heuristic") {
                xppn::HeuristicConfig cfg;
                cfg.seed = s_seed;
                xppn::TourSolution sol = xppn::heuristic_solve(reduced, cfg);
                xppn::TourSolution full = xppn::extend_solution(inst, reduction, sol);
                spill(s_out, xppn::write_solution(full, inst));
                std::cout << "heuristic cost " << xppn::format_real(full.cost) << "\n";
                return 0;
            }
            xppn::BendersConfig cfg;
            cfg.heuristic.seed = s_seed;
            cfg.time_limit_s = s_time_limit;
            xppn::BendersResult res = xppn::benders_solve(reduced, s_eps, cfg);
            xppn::TourSolution full = xppn::extend_solution(inst, reduction, res.best);
            spill(s_out, xppn::write_solution(full, inst));
            if (!s_log.empty()) spill(s_log, xppn::format_run_log(res));
            std::cout << "status "
                      << (res.status == xppn::SolveStatus::optimal      ? "optimal"
                          : res.status == xppn::SolveStatus::time_limit ? "time_limit"
                                                                        : "gap_limit")
                      << "  cost " << xppn::format_real(res.upper_bound) << "  bound "
                      << xppn::format_real(res.lower_bound) << "  cuts " << res.cuts.size()
                      << "  iters " << res.iterations << "\n";
            return res.status == xppn::SolveStatus::time_limit ? 3 : 0;
        }

        if (*exp) {
            xppn::Instance inst = xppn::read_instance(slurp(e_instance));
            xppn::BoundsTable bounds = xppn::compute_bounds(inst);
            xppn::Model model;
            if (e_formulation == "mtz") model = xppn::build_mtz(inst, bounds);
            else if (e_formulation == "sec") model = xppn::build_sec(inst, bounds, false).model;
            else if (e_formulation == "ssec") model = xppn::build_sec(inst, bounds, true).model;
            else model = xppn::build_time_dependent(inst, bounds, xppn::TimeParams::constant(inst));
            spill(e_out, xppn::export_model(model));
            return 0;
        }

        if (*ren) {
            xppn::Instance inst = xppn::read_instance(slurp(r_instance));
            xppn::TourSolution sol = xppn::read_solution(slurp(r_solution), inst);
            spill(r_out, xppn::render_svg(inst, sol));
            return 0;
        }

        if (*bench) {
            xppn::BenchConfig cfg;
            cfg.sizes = b_sizes;
            cfg.radii = b_radii;
            cfg.modes = b_modes;
            cfg.seeds_per_cell = b_seeds;
            cfg.eps = b_eps;
            cfg.time_limit_s = b_time_limit;
            cfg.workers = b_workers;
            xppn::BenchOutput out = xppn::run_bench(cfg);
            spill(b_out, out.csv);
            if (!b_profile.empty()) spill(b_profile, out.profile_csv);
            int solved = 0;
            for (const auto& r : out.rows)
                if (r.status.rfind("optimal", 0) == 0) ++solved;
            std::cout << "runs " << out.rows.size() << "  optimal " << solved << "\n";
            return 0;
        }
    } catch (const xppn::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const xppn::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
