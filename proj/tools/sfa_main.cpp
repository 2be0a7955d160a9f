#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfa/optimizer.hpp"
#include "sfa/qsim.hpp"
#include "sfa/schedule.hpp"
#include "sfa/spinfoam.hpp"

namespace {

using nlohmann::json;

std::vector<std::vector<double>> read_rows(const std::string& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = line.substr(0, line.find('#'));
        std::istringstream ss(stripped);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (row.empty()) continue;
        if (row.size() != columns) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(columns) + " numbers per row");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<sfa::IntertwinerBloch> read_boundary(const std::string& path) {
    std::vector<sfa::IntertwinerBloch> out;
    for (const auto& row : read_rows(path, 2)) out.push_back({row[0], row[1]});
    return out;
}

template <std::size_t N>
std::array<sfa::FaceNormals, N> read_normals(const std::string& path) {
    auto rows = read_rows(path, 3);
    if (rows.size() != 4 * N) {
        throw std::runtime_error(path + ": expected " + std::to_string(4 * N) + " rows (" +
                                 std::to_string(N) + " tetrahedra x four normals)");
    }
    std::array<sfa::FaceNormals, N> out;
    for (std::size_t e = 0; e < N; ++e) {
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& r = rows[4 * e + k];
            out[e].n[k] = Eigen::Vector3d(r[0], r[1], r[2]);
        }
    }
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    out.flush();
    if (!out.good()) {
        out.close();
        std::remove(path.c_str());
        throw std::runtime_error("write failed: " + path);
    }
}

std::string csv_from_rows(const std::vector<sfa::ScanRow>& rows) {
    std::ostringstream out;
    out << "theta,phi,probability,amplitude_re,amplitude_im\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.theta, r.phi,
                      r.probability, r.amplitude.real(), r.amplitude.imag());
        out << buf;
    }
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"Spin foam vertex amplitudes for spin-1/2 boundaries and the layered-XY circuit emulator"};
    app.require_subcommand(1);

    // vertex
    std::string vertex_out;
    auto* cmd_vertex = app.add_subcommand("vertex", "emit the 5-qubit vertex state as JSON");
    cmd_vertex->add_option("--out", vertex_out, "output path (default stdout)");

    // amplitude
    std::string amp_boundary, amp_out;
    bool amp_two_vertex = false;
    auto* cmd_amplitude =
        app.add_subcommand("amplitude", "boundary overlap, probability and amplitude");
    cmd_amplitude->add_option("--boundary", amp_boundary, "file of theta phi rows (radians)")
        ->required();
    cmd_amplitude->add_flag("--two-vertex", amp_two_vertex, "expect 8 rows, use the glued state");
    cmd_amplitude->add_option("--out", amp_out, "output path (default stdout)");

    // scan
    std::string scan_mode = "single", scan_out;
    int scan_theta = 101, scan_phi = 101;
    auto* cmd_scan = app.add_subcommand("scan", "probability landscape as CSV");
    cmd_scan->add_option("--mode", scan_mode, "single or double")
        ->check(CLI::IsMember({"single", "double"}));
    cmd_scan->add_option("--theta-grid", scan_theta, "theta sample count (default 101)");
    cmd_scan->add_option("--phi-grid", scan_phi, "phi sample count, single mode (default 101)");
    cmd_scan->add_option("--out", scan_out, "output path (default stdout)");

    // optimize
    std::string opt_couplings, opt_out;
    int opt_layers = 4, opt_restarts = 10, opt_max_iter = 2000;
    std::uint64_t opt_seed = 1;
    double opt_gtol = 1e-6;
    auto* cmd_optimize = app.add_subcommand("optimize", "synthesize a pulse schedule for |W>");
    cmd_optimize->add_option("--layers", opt_layers, "entangling layer count")->required();
    cmd_optimize->add_option("--couplings", opt_couplings, "couplings JSON")->required();
    cmd_optimize->add_option("--seed", opt_seed, "restart seed")->required();
    cmd_optimize->add_option("--restarts", opt_restarts, "independent restarts (default 10)");
    cmd_optimize->add_option("--max-iterations", opt_max_iter, "iteration cap (default 2000)");
    cmd_optimize->add_option("--gradient-tolerance", opt_gtol, "stop threshold (default 1e-6)");
    cmd_optimize->add_option("--out", opt_out, "output path (default stdout)");

    // simulate
    std::string sim_schedule, sim_boundary, sim_couplings, sim_out;
    auto* cmd_simulate =
        app.add_subcommand("simulate", "run a schedule, report all-zero probability and fidelity");
    cmd_simulate->add_option("--schedule", sim_schedule, "schedule JSON")->required();
    cmd_simulate->add_option("--boundary", sim_boundary, "file of theta phi rows")->required();
    cmd_simulate->add_option("--couplings", sim_couplings,
                             "couplings JSON (required when the schedule has layers)");
    cmd_simulate->add_option("--out", sim_out, "output path (default stdout)");

    // mc
    std::string mc_normals, mc_out;
    std::int64_t mc_samples = 0;
    std::uint64_t mc_seed = 0;
    int mc_threads = 1;
    bool mc_two_vertex = false;
    auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo group-integral estimate");
    cmd_mc->add_option("--normals", mc_normals, "20 rows of x y z (five tetrahedra)")->required();
    cmd_mc->add_option("--samples", mc_samples, "sample count (>= 1000)")->required();
    cmd_mc->add_option("--seed", mc_seed, "sampler seed")->required();
    cmd_mc->add_option("--threads", mc_threads, "worker cap (default 1)");
    cmd_mc->add_flag("--two-vertex", mc_two_vertex,
                     "glued amplitude, 32-row normals file (experimental, high variance)");
    cmd_mc->add_option("--out", mc_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (cmd_vertex->parsed()) {
        const auto& w = sfa::vertex_state();
        json j = json::array();
        for (double a : w.amplitudes) j.push_back({a, 0.0});
        write_output(vertex_out, j.dump(2) + "\n");
        return 0;
    }

    if (cmd_amplitude->parsed()) {
        auto boundary = read_boundary(amp_boundary);
        sfa::AmplitudeResult r;
        if (amp_two_vertex) {
            if (boundary.size() != 8) {
                throw std::runtime_error("--two-vertex needs exactly 8 boundary rows, got " +
                                         std::to_string(boundary.size()));
            }
            sfa::Boundary8 b;
            std::copy(boundary.begin(), boundary.end(), b.t.begin());
            r = sfa::amplitude_double(b);
        } else {
            if (boundary.size() != 5) {
                throw std::runtime_error("expected 5 boundary rows (or pass --two-vertex), got " +
                                         std::to_string(boundary.size()));
            }
            sfa::Boundary5 b;
            std::copy(boundary.begin(), boundary.end(), b.t.begin());
            r = sfa::amplitude_single(b);
        }
        json j{{"amplitude_re", r.overlap.real()},
               {"amplitude_im", r.overlap.imag()},
               {"probability", r.probability}};
        write_output(amp_out, j.dump(2) + "\n");
        return 0;
    }

    if (cmd_scan->parsed()) {
        std::vector<sfa::ScanRow> rows = scan_mode == "single"
                                             ? sfa::scan_single(scan_theta, scan_phi)
                                             : sfa::scan_double(scan_theta);
        write_output(scan_out, csv_from_rows(rows));
        return 0;
    }

    if (cmd_optimize->parsed()) {
        if (opt_layers < 1) throw std::runtime_error("--layers must be >= 1");
        auto couplings = sfa::load_couplings(opt_couplings);
        sfa::OptimizerConfig cfg;
        cfg.restarts = opt_restarts;
        cfg.max_iterations = opt_max_iter;
        cfg.gradient_tolerance = opt_gtol;
        cfg.seed = opt_seed;
        sfa::OptimizationResult result;
        if (couplings.size() == 1) {
            result = sfa::optimize_single(couplings[0], opt_layers, cfg);
        } else if (couplings.size() == 2) {
            result = sfa::optimize_parallel(couplings[0], couplings[1], opt_layers, cfg);
        } else {
            throw std::runtime_error("couplings file must define one or two groups");
        }
        std::map<std::string, double> meta{
            {"fidelity", result.fidelity},
            {"iterations", static_cast<double>(result.iterations)},
            {"seed", static_cast<double>(result.seed)},
            {"restarts", static_cast<double>(result.restarts.size())},
            {"best_restart", static_cast<double>(result.best_restart)},
            {"layers", static_cast<double>(opt_layers)}};
        write_output(opt_out, sfa::schedule_to_json_text(result.best, meta));
        return 0;
    }

    if (cmd_simulate->parsed()) {
        auto schedule = sfa::load_schedule(sim_schedule);
        auto boundary = read_boundary(sim_boundary);
        if (boundary.size() != 5 && boundary.size() != 10) {
            throw std::runtime_error("simulate expects 5 or 10 boundary rows, got " +
                                     std::to_string(boundary.size()));
        }
        const int n = static_cast<int>(boundary.size());
        sfa::CouplingSet couplings;
        if (!sim_couplings.empty()) {
            couplings = sfa::load_couplings(sim_couplings);
        } else if (!schedule.layers.empty()) {
            throw std::runtime_error("schedule has entangling layers: pass --couplings");
        }
        sfa::StateVector state = sfa::run_schedule(schedule, couplings, n);

        Eigen::VectorXcd target(1 << n);
        if (n == 5) {
            const auto& w = sfa::vertex_state().amplitudes;
            for (int i = 0; i < 32; ++i) target(i) = w[static_cast<std::size_t>(i)];
        } else {
            const auto wd = sfa::two_vertex_ten_qubit_form();
            for (int i = 0; i < 1024; ++i) target(i) = wd[static_cast<std::size_t>(i)];
        }
        double fidelity = state.fidelity_pure(sfa::StateVector::from_amplitudes(target));

        for (int q = 0; q < n; ++q) {
            state.apply_u_inverse(q, boundary[static_cast<std::size_t>(q)].theta,
                                  boundary[static_cast<std::size_t>(q)].phi);
        }
        json j{{"all_zero_probability", state.all_zero_probability()},
               {"fidelity_w", fidelity},
               {"qubits", n}};
        write_output(sim_out, j.dump(2) + "\n");
        return 0;
    }

    if (cmd_mc->parsed()) {
        sfa::McEstimate est;
        if (mc_two_vertex) {
            est = sfa::mc_amplitude_double(read_normals<8>(mc_normals), mc_samples, mc_seed,
                                           mc_threads);
        } else {
            est = sfa::mc_amplitude_single(read_normals<5>(mc_normals), mc_samples, mc_seed,
                                           mc_threads);
        }
        json j{{"estimate_re", est.estimate.real()},
               {"estimate_im", est.estimate.imag()},
               {"std_error", est.std_error},
               {"empirical_Z", est.empirical_z},
               {"samples", est.samples}};
        write_output(mc_out, j.dump(2) + "\n");
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
