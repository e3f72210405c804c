#include "hco/io.hpp"

#include <cstdio>
#include <fstream>

#include "hco/errors.hpp"

namespace hco {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_number(const std::string& s, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse angle '" + whole + "'");
    }
    if (used != s.size()) throw ConfigError("cannot parse angle '" + whole + "'");
    return v;
}

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != ' ' && c != '\t') out += c;
    return out;
}

} // namespace

double parse_angle(const std::string& text) {
    const std::string s = strip(text);
    if (s.empty()) throw ConfigError("empty angle value");
    const std::size_t at = s.find("pi");
    if (at == std::string::npos) return parse_number(s, text);

    const std::string left = s.substr(0, at);
    const std::string right = s.substr(at + 2);
    double coef = 1.0;
    if (left == "-") coef = -1.0;
    else if (left == "+" || left.empty()) coef = 1.0;
    else if (left.back() == '*') coef = parse_number(left.substr(0, left.size() - 1), text);
    else throw ConfigError("cannot parse angle '" + text + "' (expected a*pi+b)");

    double off = 0.0;
    if (!right.empty()) {
        if (right[0] != '+' && right[0] != '-')
            throw ConfigError("cannot parse angle '" + text + "' (expected a*pi+b)");
        off = parse_number(right, text);
    }
    return coef * pi + off;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    std::string out = "t,phi1,phi2,lift1,lift2\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const TorusState s = tr.state_at(i);
        out += format_g17(tr.times[i]);
        out += ',';
        out += format_g17(s.phi1);
        out += ',';
        out += format_g17(s.phi2);
        out += ',';
        out += format_g17(*s.lift1);
        out += ',';
        out += format_g17(*s.lift2);
        out += '\n';
    }
    write_text_file(path, out);
}

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::spike1: return "SPIKE_1";
        case EventKind::spike2: return "SPIKE_2";
        default: return "SECTION";
    }
}

void write_events_csv(const std::string& path, const Trajectory& tr) {
    std::string out = "t,kind,element\n";
    for (const Event& e : tr.events) {
        out += format_g17(e.t);
        out += ',';
        out += event_kind_name(e.kind);
        out += ',';
        out += std::to_string(e.element);
        out += '\n';
    }
    write_text_file(path, out);
}

ordered_json equilibria_to_json(const std::vector<Equilibrium>& eqs) {
    ordered_json arr = ordered_json::array();
    for (const Equilibrium& e : eqs) {
        ordered_json j;
        j["phi1"] = e.state.phi1;
        j["phi2"] = e.state.phi2;
        j["re_l1"] = e.eigenvalues[0].real();
        j["im_l1"] = e.eigenvalues[0].imag();
        j["re_l2"] = e.eigenvalues[1].real();
        j["im_l2"] = e.eigenvalues[1].imag();
        j["kind"] = to_string(e.kind);
        j["etype"] = to_string(e.etype);
        arr.push_back(std::move(j));
    }
    return arr;
}

ordered_json cycle_to_json(const LimitCycle& c) {
    ordered_json j;
    j["period"] = c.period;
    j["w1"] = c.winding[0];
    j["w2"] = c.winding[1];
    j["phase_class"] = to_string(c.phase_class);
    j["floquet"] = c.floquet;
    j["floquet_trace"] = c.floquet_trace;
    j["stable"] = c.stable;
    j["neutral"] = c.neutral;
    j["section_phi2"] = c.section_phi2;
    ordered_json samples = ordered_json::array();
    for (const TorusState& s : c.samples) samples.push_back({s.phi1, s.phi2});
    j["samples"] = std::move(samples);
    return j;
}

ordered_json regime_report_to_json(const RegimeReport& rep) {
    ordered_json j;
    j["label"] = to_string(rep.label);
    j["stable_equilibria"] = rep.stable_equilibria;
    ordered_json cyc = ordered_json::array();
    for (const auto& [cls, period] : rep.stable_cycles)
        cyc.push_back({{"phase_class", to_string(cls)}, {"period", period}});
    j["stable_cycles"] = std::move(cyc);
    ordered_json votes = ordered_json::object();
    for (const auto& [id, frac] : rep.basin_votes) votes[id] = frac;
    j["basin_votes"] = std::move(votes);
    j["total_runs"] = rep.total_runs;
    j["undecided_runs"] = rep.undecided_runs;
    j["saddle_limit_runs"] = rep.saddle_limit_runs;
    return j;
}

void write_sweep_csv(const std::string& path, const SweepGrid& grid) {
    std::string out = "alpha,delta,label,n_stable_eq,n_cycles\n";
    for (int j = 0; j < grid.n2; ++j)
        for (int i = 0; i < grid.n1; ++i) {
            const SweepCell& c = grid.at(i, j);
            out += format_g17(grid.alpha_of(i));
            out += ',';
            out += format_g17(grid.delta_of(j));
            out += ',';
            out += to_string(c.label);
            out += ',';
            out += std::to_string(c.n_stable_eq);
            out += ',';
            out += std::to_string(c.n_cycles);
            out += '\n';
        }
    write_text_file(path, out);
}

void write_separatrix_csv(const std::string& path, const Separatrix& sep) {
    std::string out = "t,phi1,phi2\n";
    for (std::size_t i = 0; i < sep.path.size(); ++i) {
        const TorusState s = sep.path.state_at(i);
        out += format_g17(sep.path.times[i]);
        out += ',';
        out += format_g17(s.phi1);
        out += ',';
        out += format_g17(s.phi2);
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace hco
