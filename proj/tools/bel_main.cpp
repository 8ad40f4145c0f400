// bel: numerical laboratory CLI.
//
//   bel make-data --M 4 --N 2 --N0 2 --p 2.5 --grid 1024 --out w0.bel
//   bel solve --in w0.bel --t-end 5 --out-dir run/
//   bel flow --traj run/ --seeds 0,0,0.7,65 --t 5 --out markers.csv
//   bel norms --in w0.bel --s 1 --p inf --q 1 --dump-blocks blocks.csv
//   bel experiment e1 .. e8 | all   (exit code 0 only if all checks pass)

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bel/experiments.hpp"
#include "bel/fft.hpp"
#include "bel/kernels.hpp"
#include "bel/initial_data.hpp"
#include "bel/lagrangian.hpp"
#include "bel/littlewood_paley.hpp"
#include "bel/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace bel;
using std::numbers::pi;

namespace {

double parse_p(const std::string& s) {
    if (s == "inf" || s == "infinity") return spectral::infinity;
    return std::stod(s);
}

std::array<double, 2> parse_pair(const std::string& s) {
    std::array<double, 2> out{};
    std::stringstream ss(s);
    char comma;
    ss >> out[0] >> comma >> out[1];
    if (ss.fail()) throw CLI::ValidationError("expected a,b");
    return out;
}

flow::SeedSpec parse_seeds(const std::string& s) {
    // main lattice "cx,cy,half,n" plus optional ";cx,cy,half,n" clusters
    flow::SeedSpec spec;
    std::stringstream ss(s);
    std::string part;
    bool first = true;
    while (std::getline(ss, part, ';')) {
        std::stringstream ps(part);
        double cx, cy, half;
        int n;
        char c;
        ps >> cx >> c >> cy >> c >> half >> c >> n;
        if (ps.fail()) throw CLI::ValidationError("expected cx,cy,half,n");
        if (first) {
            spec.center = {cx, cy};
            spec.half_extent = half;
            spec.per_axis = n;
            first = false;
        } else {
            spec.clusters.push_back({{cx, cy}, half, n});
        }
    }
    if (first) throw CLI::ValidationError("empty seed spec");
    return spec;
}

void set_threads(int k) {
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
#endif
    fft::set_threads(k > 0 ? k : kernels::thread_count());
}

void write_times_index(const std::string& dir, const euler::Trajectory& traj) {
    std::ofstream idx(dir + "/times.csv");
    idx << "index,t,file\n";
    for (std::size_t i = 0; i < traj.snapshot_times.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "w_%06zu.bel", i);
        idx << i << "," << std::setprecision(17) << traj.snapshot_times[i] << "," << name << "\n";
        write_snapshot(dir + "/" + name, traj.snapshots[i]);
    }
}

std::pair<std::vector<double>, std::vector<ScalarField>> read_times_index(const std::string& dir) {
    std::ifstream idx(dir + "/times.csv");
    if (!idx) throw std::runtime_error("missing " + dir + "/times.csv");
    std::string line;
    std::getline(idx, line); // header
    std::vector<double> times;
    std::vector<ScalarField> snaps;
    while (std::getline(idx, line)) {
        std::stringstream ss(line);
        std::string i, t, file;
        std::getline(ss, i, ',');
        std::getline(ss, t, ',');
        std::getline(ss, file, ',');
        times.push_back(std::stod(t));
        snaps.push_back(read_snapshot(dir + "/" + file));
    }
    return {times, snaps};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for 2D Euler vorticity constructions"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, out_dir = "out";
    int grid_override = 0, threads = 0;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid_override, "override grid points per axis");
    app.add_option("--threads", threads, "OpenMP / FFT thread count");

    // make-data
    auto* mk = app.add_subcommand("make-data", "construct initial vorticity");
    double mk_M = 4.0, mk_p = 2.5, mk_L = pi;
    int mk_N = 2, mk_N0 = 2, mk_n = 0, mk_grid = 1024;
    std::string mk_out = "w0.bel", mk_xstar = "0.15,0.11";
    mk->add_option("--M", mk_M);
    mk->add_option("--N", mk_N);
    mk->add_option("--N0", mk_N0);
    mk->add_option("--p", mk_p);
    mk->add_option("--n", mk_n, "add the beta_n perturbation");
    mk->add_option("--xstar", mk_xstar, "perturbation center a,b");
    mk->add_option("--grid", mk_grid);
    mk->add_option("--L", mk_L, "box half width");
    mk->add_option("--out", mk_out);

    // solve
    auto* sv = app.add_subcommand("solve", "integrate the vorticity equation");
    std::string sv_in, sv_dir = "run";
    double sv_tend = 1.0, sv_dt = 0.0, sv_dtmax = 0.25;
    int sv_stride = 1;
    bool sv_no_sym = false, sv_no_dealias = false;
    sv->add_option("--in", sv_in)->required();
    sv->add_option("--t-end", sv_tend);
    sv->add_option("--dt", sv_dt);
    sv->add_option("--dt-max", sv_dtmax);
    sv->add_option("--out-dir", sv_dir);
    sv->add_option("--snapshot-stride", sv_stride);
    sv->add_flag("--no-symmetry", sv_no_sym);
    sv->add_flag("--no-dealias", sv_no_dealias);

    // flow
    auto* fl = app.add_subcommand("flow", "advect markers through a stored trajectory");
    std::string fl_traj = "run", fl_seeds = "0,0,0.7,65", fl_out = "markers.csv";
    double fl_t = 1.0, fl_dt = 0.05;
    fl->add_option("--traj", fl_traj);
    fl->add_option("--seeds", fl_seeds, "cx,cy,half,n[;cluster...]");
    fl->add_option("--t", fl_t);
    fl->add_option("--dt", fl_dt);
    fl->add_option("--out", fl_out);

    // norms
    auto* nm = app.add_subcommand("norms", "Besov / Lp norm report of a snapshot");
    std::string nm_in, nm_p = "inf", nm_q = "1", nm_blocks;
    double nm_s = 0.0;
    nm->add_option("--in", nm_in)->required();
    nm->add_option("--s", nm_s);
    nm->add_option("--p", nm_p);
    nm->add_option("--q", nm_q);
    nm->add_option("--dump-blocks", nm_blocks, "write per-shell CSV");

    // experiment / all
    auto* ex = app.add_subcommand("experiment", "run one experiment pipeline");
    std::string ex_id;
    ex->add_option("id", ex_id, "e1..e8")->required();
    auto* all = app.add_subcommand("all", "run every experiment");

    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "config override key=value")->take_all();

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);

    report::KvConfig cfg = report::KvConfig::load(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos) cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    try {
        if (*mk) {
            const int n_pts = grid_override > 0 ? grid_override : mk_grid;
            GridSpec g(n_pts, mk_L);
            data::QuadrupoleParams q{mk_M, mk_N, mk_N0, mk_p};
            ScalarField w = mk_n > 0
                                ? data::perturbed_sequence(
                                      q, data::PerturbationParams(mk_n, parse_pair(mk_xstar), mk_p),
                                      data::RhoSpec::standard(), g)
                                : data::omega0(q, g);
            write_snapshot(mk_out, w);
            std::printf("wrote %s (%d^2, L=%g)\n", mk_out.c_str(), g.n, g.half_width);
            return 0;
        }
        if (*sv) {
            ScalarField w0 = read_snapshot(sv_in);
            euler::SolverConfig scfg;
            scfg.t_end = sv_tend;
            scfg.dt = sv_dt;
            scfg.dt_max = sv_dtmax;
            scfg.snapshot_stride = sv_stride;
            scfg.symmetry_enforce = !sv_no_sym;
            scfg.dealias = !sv_no_dealias;
            euler::Trajectory traj = euler::solve(w0, scfg);
            std::filesystem::create_directories(sv_dir);
            write_times_index(sv_dir, traj);
            euler::write_diagnostics_csv(sv_dir + "/diagnostics.csv", traj);
            std::printf("solved to t=%g in %zu steps (%d CFL halvings), wrote %s\n",
                        traj.final_time(), traj.diag.size() - 1, traj.halvings, sv_dir.c_str());
            return 0;
        }
        if (*fl) {
            auto [times, snaps] = read_times_index(fl_traj);
            const double L = snaps.front().grid().half_width;
            flow::TrajectorySampler sampler(times, std::move(snaps));
            flow::FlowState st = flow::FlowState::seed(parse_seeds(fl_seeds));
            st = flow::advance_flow(st, sampler, fl_t, fl_dt, L);
            flow::write_markers_csv(fl_out, st);
            auto rep = flow::sup_deformation(st);
            std::printf("advanced %zu markers to t=%g: sup|Deta| = %g, wrote %s\n",
                        st.markers.size(), fl_t, rep.value, fl_out.c_str());
            return 0;
        }
        if (*nm) {
            ScalarField f = read_snapshot(nm_in);
            lp::BesovParams prm{nm_s, parse_p(nm_p), parse_p(nm_q)};
            auto r = lp::besov_norm(f, prm);
            std::printf("besov(s=%g, p=%s, q=%s) = %.12g  (tail estimate %.3g, ell_max %d)\n",
                        nm_s, nm_p.c_str(), nm_q.c_str(), r.value, r.tail_estimate, r.ell_max);
            if (!nm_blocks.empty()) {
                std::ofstream out(nm_blocks);
                out << "ell,block_lp_norm,weighted_term\n";
                for (std::size_t i = 0; i < r.block_lp.size(); ++i)
                    out << int(i) - 1 << "," << std::setprecision(17) << r.block_lp[i] << ","
                        << r.weighted_term[i] << "\n";
                std::printf("wrote %s\n", nm_blocks.c_str());
            }
            return 0;
        }
        if (*ex || *all) {
            experiments::Workspace ws;
            ws.cfg = cfg;
            ws.out_dir = out_dir;
            if (grid_override > 0) {
                ws.cfg.set("e2.grid", std::to_string(grid_override));
                ws.cfg.set("e3.grid", std::to_string(grid_override));
                ws.cfg.set("e5.grid", std::to_string(grid_override));
                ws.cfg.set("chain.grid", std::to_string(grid_override));
                ws.cfg.set("e8.grid", std::to_string(grid_override));
            }
            std::vector<std::string> ids;
            if (*all)
                ids = {"e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"};
            else
                ids = {ex_id};
            bool ok = true;
            for (const auto& id : ids) {
                auto rep = experiments::run_experiment(ws, id);
                report::emit(rep, out_dir + "/" + id);
                report::print_summary(rep);
                ok = ok && rep.all_passed();
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
