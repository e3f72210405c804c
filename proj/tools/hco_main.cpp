#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hco/checks.hpp"
#include "hco/cycles.hpp"
#include "hco/equilibria.hpp"
#include "hco/errors.hpp"
#include "hco/integrator.hpp"
#include "hco/io.hpp"
#include "hco/model.hpp"
#include "hco/portrait.hpp"
#include "hco/regimes.hpp"

namespace fs = std::filesystem;
using hco::ordered_json;

namespace {

// Every option lives in one flat, fully resolved configuration; the config
// file seeds it and command-line flags override field by field. The sidecar
// written next to each output reproduces the run exactly.
struct RunConfig {
    // model
    double gamma = 0.7, d = 1.0, k = 50.0, alpha = 0.0, delta = 0.0;
    // integrator
    double rel_tol = 1e-9, abs_tol = 1e-9, max_step = 0.0; // 0 -> 0.2/k
    double t_transient = 200.0, t_max = 2000.0;
    bool wall_aware = false;
    // command specifics
    double phi1 = 0.0, phi2 = 0.0;
    double t_end = 100.0;
    int ic_grid = 16;
    int sweep_ic_grid = 4;
    int n1 = 64, n2 = 64;
    double alpha_min = 0.0, alpha_max = hco::two_pi;
    double delta_min = 0.0, delta_max = hco::two_pi;
    bool inventory = false;
    std::string mode = "boundary";     // locate: boundary | connection
    std::string axis = "d";            // locate: alpha | delta | d
    std::string pair = "swap";         // locate connection: swap | diagonal | mixed
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double max_undecided = 0.05;
    int sets = 200, states = 100, ics = 25;
    bool condition = false; // cycles: also report the anti-phase condition
    bool use_ic = false;    // cycles: detect from (phi1, phi2) instead of scanning
    // common
    int jobs = 1;
    std::uint64_t seed = 1;

    hco::Params params() const {
        return hco::Params{gamma, d, k, alpha, delta}.normalized();
    }
    hco::IntegratorSettings settings() const {
        hco::IntegratorSettings s;
        s.rel_tol = rel_tol;
        s.abs_tol = abs_tol;
        s.max_step = max_step > 0.0 ? max_step : 0.2 / k;
        s.t_transient = t_transient;
        s.t_max = t_max;
        s.wall_aware = wall_aware;
        return s;
    }
};

double json_angle(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return hco::parse_angle(v.get<std::string>());
    throw hco::ConfigError("config field '" + key + "' must be a number or an angle string");
}

void load_config_file(const std::string& path, RunConfig& c) {
    std::ifstream f(path);
    if (!f) throw hco::ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw hco::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw hco::ConfigError("config file must hold a JSON object");

    auto num = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = j[key].get<double>();
    };
    auto angle = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = json_angle(j[key], key);
    };
    num("gamma", c.gamma);
    num("d", c.d);
    num("k", c.k);
    angle("alpha", c.alpha);
    angle("delta", c.delta);
    num("rel_tol", c.rel_tol);
    num("abs_tol", c.abs_tol);
    num("max_step", c.max_step);
    num("t_transient", c.t_transient);
    num("t_max", c.t_max);
    if (j.contains("wall_aware")) c.wall_aware = j["wall_aware"].get<bool>();
    angle("phi1", c.phi1);
    angle("phi2", c.phi2);
    num("t_end", c.t_end);
    if (j.contains("ic_grid")) c.ic_grid = j["ic_grid"].get<int>();
    if (j.contains("sweep_ic_grid")) c.sweep_ic_grid = j["sweep_ic_grid"].get<int>();
    if (j.contains("n1")) c.n1 = j["n1"].get<int>();
    if (j.contains("n2")) c.n2 = j["n2"].get<int>();
    angle("alpha_min", c.alpha_min);
    angle("alpha_max", c.alpha_max);
    angle("delta_min", c.delta_min);
    angle("delta_max", c.delta_max);
    if (j.contains("inventory")) c.inventory = j["inventory"].get<bool>();
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("axis")) c.axis = j["axis"].get<std::string>();
    if (j.contains("pair")) c.pair = j["pair"].get<std::string>();
    angle("bracket_lo", c.bracket_lo);
    angle("bracket_hi", c.bracket_hi);
    num("max_undecided", c.max_undecided);
    if (j.contains("sets")) c.sets = j["sets"].get<int>();
    if (j.contains("states")) c.states = j["states"].get<int>();
    if (j.contains("ics")) c.ics = j["ics"].get<int>();
    if (j.contains("condition")) c.condition = j["condition"].get<bool>();
    if (j.contains("use_ic")) c.use_ic = j["use_ic"].get<bool>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
}

ordered_json config_to_json(const std::string& command, const RunConfig& c) {
    ordered_json j;
    j["command"] = command;
    j["gamma"] = c.gamma;
    j["d"] = c.d;
    j["k"] = c.k;
    j["alpha"] = c.alpha;
    j["delta"] = c.delta;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["max_step"] = c.max_step;
    j["t_transient"] = c.t_transient;
    j["t_max"] = c.t_max;
    j["wall_aware"] = c.wall_aware;
    j["phi1"] = c.phi1;
    j["phi2"] = c.phi2;
    j["t_end"] = c.t_end;
    j["ic_grid"] = c.ic_grid;
    j["sweep_ic_grid"] = c.sweep_ic_grid;
    j["n1"] = c.n1;
    j["n2"] = c.n2;
    j["alpha_min"] = c.alpha_min;
    j["alpha_max"] = c.alpha_max;
    j["delta_min"] = c.delta_min;
    j["delta_max"] = c.delta_max;
    j["inventory"] = c.inventory;
    j["mode"] = c.mode;
    j["axis"] = c.axis;
    j["pair"] = c.pair;
    j["bracket_lo"] = c.bracket_lo;
    j["bracket_hi"] = c.bracket_hi;
    j["max_undecided"] = c.max_undecided;
    j["sets"] = c.sets;
    j["states"] = c.states;
    j["ics"] = c.ics;
    j["condition"] = c.condition;
    j["use_ic"] = c.use_ic;
    j["jobs"] = c.jobs;
    j["seed"] = c.seed;
    return j;
}

void write_json(const fs::path& path, const ordered_json& j) {
    hco::write_text_file(path.string(), j.dump(2) + "\n");
}

fs::path prepare_out(const std::string& out, const std::string& command, const RunConfig& c) {
    fs::path dir(out);
    fs::create_directories(dir);
    write_json(dir / "config.json", config_to_json(command, c));
    return dir;
}

hco::ParamAxis axis_from(const std::string& name) {
    if (name == "alpha") return hco::ParamAxis::alpha;
    if (name == "delta") return hco::ParamAxis::delta;
    if (name == "d") return hco::ParamAxis::d;
    throw hco::ConfigError("axis must be one of alpha, delta, d (got '" + name + "')");
}

int cmd_simulate(const RunConfig& c, const std::string& out) {
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "simulate", c);
    const hco::TorusState s0{hco::reduce_angle(c.phi1), hco::reduce_angle(c.phi2), {}, {}};
    const hco::Trajectory tr = hco::integrate(s0, p, c.settings(), c.t_end);
    hco::write_trajectory_csv((dir / "trajectory.csv").string(), tr);
    hco::write_events_csv((dir / "events.csv").string(), tr);
    return 0;
}

int cmd_equilibria(const RunConfig& c, const std::string& out) {
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "equilibria", c);
    const auto eqs = hco::find_equilibria(p);
    const auto cen = hco::census_of(eqs);
    ordered_json j;
    j["equilibria"] = hco::equilibria_to_json(eqs);
    ordered_json cj;
    cj["n_stable"] = cen.n_stable;
    cj["n_unstable"] = cen.n_unstable;
    cj["n_saddle"] = cen.n_saddle;
    cj["all_hyperbolic"] = cen.all_hyperbolic;
    if (cen.configuration_id) cj["configuration_id"] = *cen.configuration_id;
    else cj["configuration_id"] = nullptr;
    j["census"] = std::move(cj);
    j["property4"] = hco::check_property4(p);
    write_json(dir / "equilibria.json", j);
    return 0;
}

int cmd_cycles(const RunConfig& c, const std::string& out) {
    const bool have_ic = c.use_ic;
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "cycles", c);
    const hco::IntegratorSettings set = c.settings();
    ordered_json j;
    ordered_json cycles = ordered_json::array();
    bool undecided = false;

    if (have_ic) {
        const hco::TorusState s0{hco::reduce_angle(c.phi1), hco::reduce_angle(c.phi2), {}, {}};
        const hco::CycleDetection det = hco::detect_cycle(s0, p, set);
        switch (det.outcome) {
            case hco::DetectOutcome::cycle:
                j["detection"] = "cycle";
                cycles.push_back(hco::cycle_to_json(*det.cycle));
                break;
            case hco::DetectOutcome::equilibrium:
                j["detection"] = "equilibrium";
                j["endpoint"] = {det.endpoint->phi1, det.endpoint->phi2};
                break;
            default:
                j["detection"] = "undecided";
                undecided = true;
                break;
        }
    } else {
        j["detection"] = "scan";
        if (auto in = hco::find_inphase_cycle(p, set)) cycles.push_back(hco::cycle_to_json(*in));
        if (auto anti = hco::find_antiphase_cycle(p, set))
            cycles.push_back(hco::cycle_to_json(*anti));
    }
    j["cycles"] = std::move(cycles);

    if (c.condition) {
        ordered_json cond;
        try {
            cond["quadrature"] = hco::antiphase_condition_quadrature(p);
        } catch (const std::exception& e) {
            cond["quadrature"] = nullptr;
            cond["quadrature_error"] = e.what();
        }
        try {
            cond["closed_form"] = hco::antiphase_condition_closed_form(p);
        } catch (const std::exception& e) {
            cond["closed_form"] = nullptr;
            cond["closed_form_error"] = e.what();
        }
        j["antiphase_condition"] = std::move(cond);
    }
    write_json(dir / "cycles.json", j);
    return undecided ? 4 : 0;
}

int cmd_portrait(const RunConfig& c, const std::string& out) {
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "portrait", c);
    const hco::IntegratorSettings set = c.settings();
    const auto eqs = hco::find_equilibria(p);
    std::vector<hco::LimitCycle> cycles;
    if (auto in = hco::find_inphase_cycle(p, set)) cycles.push_back(std::move(*in));
    if (auto anti = hco::find_antiphase_cycle(p, set)) cycles.push_back(std::move(*anti));

    ordered_json j;
    j["saddles"] = ordered_json::array();
    j["separatrices"] = ordered_json::array();
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        if (eqs[i].kind != hco::EqKind::saddle) continue;
        j["saddles"].push_back({{"index", i},
                                {"phi1", eqs[i].state.phi1},
                                {"phi2", eqs[i].state.phi2},
                                {"etype", hco::to_string(eqs[i].etype)}});
        const auto seps = hco::trace_separatrices(i, eqs, p, set, cycles);
        for (const hco::Separatrix& s : seps) {
            const std::string file =
                "separatrix_" + std::to_string(i) + "_" + hco::to_string(s.branch) + ".csv";
            hco::write_separatrix_csv((dir / file).string(), s);
            j["separatrices"].push_back({{"saddle", i},
                                         {"branch", hco::to_string(s.branch)},
                                         {"terminus", hco::to_string(s.terminus)},
                                         {"terminus_index", s.terminus_index},
                                         {"file", file}});
        }
    }

    ordered_json gaps = ordered_json::array();
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        if (eqs[i].kind != hco::EqKind::saddle || eqs[i].etype != hco::EqType::off_diagonal)
            continue;
        for (std::size_t jj = 0; jj < eqs.size(); ++jj) {
            if (jj == i || eqs[jj].kind != hco::EqKind::saddle) continue;
            if (hco::torus_dist(eqs[i].state.phi1, eqs[i].state.phi2, eqs[jj].state.phi2,
                                eqs[jj].state.phi1) > 1e-6)
                continue;
            try {
                const hco::ConnectionGap g = hco::connection_gap(i, jj, eqs, p, set);
                gaps.push_back({{"from", g.from_saddle},
                                {"to", g.to_saddle},
                                {"signed_gap", g.signed_gap}});
            } catch (const hco::NoApproach&) {
                gaps.push_back({{"from", i}, {"to", jj}, {"signed_gap", nullptr}});
            }
        }
    }
    ordered_json diags = ordered_json::array();
    for (const auto& [from, to] : hco::diagonal_connections(eqs, p))
        diags.push_back({{"from", from}, {"to", to}});
    j["gaps"] = std::move(gaps);
    j["diagonal_connections"] = std::move(diags);
    write_json(dir / "portrait.json", j);
    return 0;
}

int cmd_sweep(const RunConfig& c, const std::string& out) {
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "sweep", c);
    hco::SweepOptions opt;
    opt.ic_grid = c.sweep_ic_grid;
    opt.inventory = c.inventory;
    opt.jobs = c.jobs;
    const hco::SweepGrid grid = hco::sweep_plane({c.alpha_min, c.alpha_max},
                                                 {c.delta_min, c.delta_max}, c.n1, c.n2, p, opt);
    hco::write_sweep_csv((dir / "sweep.csv").string(), grid);

    int undecided = 0;
    for (const auto& cell : grid.cells)
        if (cell.label == hco::RegimeLabel::UNDECIDED) ++undecided;
    const double frac = grid.cells.empty() ? 0.0
                                           : static_cast<double>(undecided) / grid.cells.size();
    ordered_json j;
    j["n_cells"] = grid.cells.size();
    j["undecided_fraction"] = frac;
    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& cell : grid.cells) ++counts[static_cast<int>(cell.label)];
    j["label_counts"] = {{"A", counts[0]}, {"B", counts[1]}, {"C", counts[2]},
                         {"D", counts[3]}, {"OTHER", counts[4]}, {"UNDECIDED", counts[5]}};
    if (grid.inventory) j["symmetry_fold_mismatch"] = hco::symmetry_fold(grid);
    write_json(dir / "sweep_summary.json", j);
    return frac > c.max_undecided ? 4 : 0;
}

int cmd_locate(const RunConfig& c, const std::string& out) {
    const hco::Params p = c.params();
    const fs::path dir = prepare_out(out, "locate", c);
    const hco::ParamAxis axis = axis_from(c.axis);
    if (!(c.bracket_hi > c.bracket_lo))
        throw hco::ConfigError("bracket_lo must be below bracket_hi (field bracket)");
    ordered_json j;
    double value = 0.0;
    if (c.mode == "boundary") {
        const auto res = hco::locate_boundary(axis, {c.bracket_lo, c.bracket_hi}, p, c.ic_grid,
                                              c.settings());
        value = res.value;
        j["kind"] = "boundary";
        j["label_pair"] = {hco::to_string(res.left), hco::to_string(res.right)};
    } else if (c.mode == "connection") {
        hco::SaddlePair pair = hco::SaddlePair::offdiag_swap;
        if (c.pair == "diagonal") pair = hco::SaddlePair::diagonal;
        else if (c.pair == "mixed") pair = hco::SaddlePair::diag_to_offdiag;
        else if (c.pair != "swap")
            throw hco::ConfigError("pair must be one of swap, diagonal, mixed");
        value = hco::locate_connection(axis, {c.bracket_lo, c.bracket_hi}, p, c.settings(), pair);
        j["kind"] = "connection";
        j["pair"] = c.pair;
    } else {
        throw hco::ConfigError("mode must be 'boundary' or 'connection'");
    }
    j["axis"] = c.axis;
    j["value"] = value;
    write_json(dir / "locate.json", j);
    std::cout << hco::format_g17(value) << "\n";
    return 0;
}

int cmd_check(const RunConfig& c, const std::string& out) {
    const fs::path dir = prepare_out(out, "check", c);
    hco::CheckOptions opt;
    opt.n_param_sets = c.sets;
    opt.n_states = c.states;
    opt.n_uniqueness_sets = c.sets;
    opt.n_uniqueness_ics = c.ics;
    opt.seed = c.seed;
    const auto results = hco::run_property_suite(opt);
    ordered_json arr = ordered_json::array();
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << "[check] " << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (checked "
                  << r.checked << ", worst " << hco::format_g17(r.worst) << ")";
        if (!r.passed) std::cout << " -- " << r.detail;
        std::cout << "\n";
        arr.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"checked", r.checked},
                       {"worst", r.worst},
                       {"detail", r.detail}});
        all_ok = all_ok && r.passed;
    }
    ordered_json j;
    j["results"] = std::move(arr);
    j["all_passed"] = all_ok;
    write_json(dir / "check.json", j);
    return all_ok ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string out = "hco_out";
    std::string config_path;

    // The config file seeds every option before flags are parsed.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    try {
        if (!config_path.empty()) load_config_file(config_path, cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Dynamics toolkit for a two-rotator half-center oscillator motif"};
    app.require_subcommand(1);
    app.fallthrough(); // common flags may follow the subcommand
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--out", out, "output directory");
    app.add_option("--jobs", cfg.jobs, "worker threads for sweeps");
    app.add_option("--seed", cfg.seed, "seed for randomized checks");

    std::string alpha_s, delta_s, phi1_s, phi2_s, bracket_s;
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--gamma", cfg.gamma, "excitability parameter");
        sub->add_option("--d", cfg.d, "coupling strength");
        sub->add_option("--k", cfg.k, "coupling steepness");
        sub->add_option("--alpha", alpha_s, "activation onset (radians or a*pi+b)");
        sub->add_option("--delta", delta_s, "activation duration (radians or a*pi+b)");
        sub->add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance");
        sub->add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance");
        sub->add_option("--max-step", cfg.max_step, "max step (default 0.2/k)");
        sub->add_option("--t-transient", cfg.t_transient, "transient horizon");
        sub->add_option("--t-max", cfg.t_max, "integration budget");
        sub->add_flag("--wall-aware", cfg.wall_aware, "analytic step limiter");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory");
    add_model(simulate);
    simulate->add_option("--phi1", phi1_s, "initial phi1");
    simulate->add_option("--phi2", phi2_s, "initial phi2");
    simulate->add_option("--t-end", cfg.t_end, "integration time");

    CLI::App* equilibria = app.add_subcommand("equilibria", "find and classify equilibria");
    add_model(equilibria);

    CLI::App* cycles = app.add_subcommand("cycles", "detect / scan limit cycles");
    add_model(cycles);
    cycles->add_option("--phi1", phi1_s, "initial phi1 (detect from this state)");
    cycles->add_option("--phi2", phi2_s, "initial phi2");
    cycles->add_flag("--condition", cfg.condition, "report the anti-phase transit condition");

    CLI::App* portrait = app.add_subcommand("portrait", "trace saddle separatrices");
    add_model(portrait);

    CLI::App* sweep = app.add_subcommand("sweep", "classify a parameter plane");
    add_model(sweep);
    sweep->add_option("--n1", cfg.n1, "alpha resolution");
    sweep->add_option("--n2", cfg.n2, "delta resolution");
    sweep->add_option("--ic-grid", cfg.sweep_ic_grid, "initial-condition lattice per cell");
    sweep->add_flag("--inventory", cfg.inventory, "collect the invariant-set inventory");
    sweep->add_option("--max-undecided", cfg.max_undecided, "undecided fraction for exit 4");

    CLI::App* locate = app.add_subcommand("locate", "bisect a regime boundary or connection");
    add_model(locate);
    locate->add_option("--mode", cfg.mode, "boundary | connection");
    locate->add_option("--axis", cfg.axis, "alpha | delta | d");
    locate->add_option("--bracket", bracket_s, "lo,hi (angles accept a*pi+b)");
    locate->add_option("--ic-grid", cfg.ic_grid, "classifier lattice (boundary mode)");
    locate->add_option("--pair", cfg.pair, "swap | diagonal | mixed (connection mode)");

    CLI::App* check = app.add_subcommand("check", "run the structural property suite");
    add_model(check);
    check->add_option("--sets", cfg.sets, "randomized parameter sets");
    check->add_option("--states", cfg.states, "random states per set");
    check->add_option("--ics", cfg.ics, "initial conditions per uniqueness set");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!alpha_s.empty()) cfg.alpha = hco::parse_angle(alpha_s);
        if (!delta_s.empty()) cfg.delta = hco::parse_angle(delta_s);
        if (!phi1_s.empty()) cfg.phi1 = hco::parse_angle(phi1_s);
        if (!phi2_s.empty()) cfg.phi2 = hco::parse_angle(phi2_s);
        if (!bracket_s.empty()) {
            const auto comma = bracket_s.find(',');
            if (comma == std::string::npos)
                throw hco::ConfigError("bracket must be 'lo,hi'");
            cfg.bracket_lo = hco::parse_angle(bracket_s.substr(0, comma));
            cfg.bracket_hi = hco::parse_angle(bracket_s.substr(comma + 1));
        }

        cfg.use_ic = cfg.use_ic || !phi1_s.empty() || !phi2_s.empty();
        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (equilibria->parsed()) return cmd_equilibria(cfg, out);
        if (cycles->parsed()) return cmd_cycles(cfg, out);
        if (portrait->parsed()) return cmd_portrait(cfg, out);
        if (sweep->parsed()) return cmd_sweep(cfg, out);
        if (locate->parsed()) return cmd_locate(cfg, out);
        if (check->parsed()) return cmd_check(cfg, out);
    } catch (const hco::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hco::BracketInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hco::StepSizeUnderflow& e) {
        std::cerr << "integration error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
