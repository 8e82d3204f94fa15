#include "uwoam/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "uwoam/rng.hpp"

namespace uwoam {

double ExperimentConfig::resolved_expected_photons() const {
    if (expected_photons >= 0.0) return expected_photons;
    const PhotonBudget budget = photon_budget(source);
    const double transmittance = std::exp(-channel.extinction * channel.length);
    return budget.rate * transmittance * detector.exposure;
}

std::string ValidationReport::to_string() const {
    if (ok()) return "config ok\n";
    std::ostringstream out;
    out << errors.size() << " config error(s):\n";
    for (const auto& e : errors) out << "  - " << e << "\n";
    return out.str();
}

ValidationReport validate_config(const ExperimentConfig& cfg) {
    ValidationReport report;
    auto check = [&report](const auto& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            report.errors.emplace_back(e.what());
        }
    };
    check([&] { cfg.grid.validate(); });
    check([&] { cfg.source.validate(); });
    check([&] { cfg.channel.validate(); });
    check([&] { cfg.detector.validate(); });
    if (!(cfg.waist > 0.0)) report.errors.emplace_back("waist must be positive");
    if (cfg.frames_per_state < 1) report.errors.emplace_back("frames_per_state must be >= 1");
    if (cfg.sent_states.empty()) report.errors.emplace_back("at least one sent state required");
    if (cfg.output_dir.empty()) report.errors.emplace_back("output_dir must not be empty");
    for (const auto& state : cfg.sent_states)
        if (const auto* s = std::get_if<SuperpositionSpec>(&state))
            check([&] { s->validate(); });
    return report;
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size())
        throw std::runtime_error("line " + std::to_string(line) + ": bad number for '" + key +
                                 "': " + v);
    return d;
}

int parse_int(const std::string& v, const std::string& key, int line) {
    const double d = parse_double(v, key, line);
    if (d != std::floor(d))
        throw std::runtime_error("line " + std::to_string(line) + ": '" + key +
                                 "' must be an integer");
    return static_cast<int>(d);
}

uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const uint64_t u = std::stoull(v, &pos);
        if (pos == v.size()) return u;
    } catch (const std::exception&) {
    }
    throw std::runtime_error("line " + std::to_string(line) + ": bad seed for '" + key + "': " + v);
}

// "superposition ell=1 theta_deg=45 [weight=0.5]" or "pure ell=-3 [p=0]"
std::variant<PureState, SuperpositionSpec> parse_state(const std::string& text, int line) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    std::map<std::string, double> kv;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(line) + ": bad state token '" + tok +
                                     "'");
        kv[tok.substr(0, eq)] = parse_double(tok.substr(eq + 1), tok, line);
    }
    if (kind == "pure") {
        PureState p;
        if (!kv.count("ell"))
            throw std::runtime_error("line " + std::to_string(line) + ": pure state needs ell=");
        p.ell = static_cast<int>(kv["ell"]);
        if (kv.count("p")) p.p = static_cast<int>(kv["p"]);
        return p;
    }
    if (kind == "superposition") {
        SuperpositionSpec s;
        if (!kv.count("ell"))
            throw std::runtime_error("line " + std::to_string(line) +
                                     ": superposition state needs ell=");
        s.ell = static_cast<int>(kv["ell"]);
        if (kv.count("theta_deg"))
            s.theta = wrap_2pi(kv["theta_deg"] * kDegToRad);
        else if (kv.count("theta"))
            s.theta = wrap_2pi(kv["theta"]);
        if (kv.count("weight")) s.weight = kv["weight"];
        return s;
    }
    throw std::runtime_error("line " + std::to_string(line) + ": unknown state kind '" + kind +
                             "' (expected pure or superposition)");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.channel.turbulence.cn2 = kCalibratedCn2;
    bool turb_seed_set = false, det_seed_set = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("line " + std::to_string(line_no) + ": unterminated section");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        auto unknown = [&]() {
            throw std::runtime_error("line " + std::to_string(line_no) + ": unknown key '" + key +
                                     "' in section [" + section + "]");
        };

        if (section == "grid") {
            if (key == "n") cfg.grid.n = parse_int(value, key, line_no);
            else if (key == "extent") cfg.grid.extent = parse_double(value, key, line_no);
            else unknown();
        } else if (section == "source") {
            if (key == "power") cfg.source.power = parse_double(value, key, line_no);
            else if (key == "wavelength") cfg.source.wavelength = parse_double(value, key, line_no);
            else if (key == "slot") cfg.source.slot = parse_double(value, key, line_no);
            else if (key == "waist") cfg.waist = parse_double(value, key, line_no);
            else unknown();
        } else if (section == "channel") {
            if (key == "length") cfg.channel.length = parse_double(value, key, line_no);
            else if (key == "extinction") cfg.channel.extinction = parse_double(value, key, line_no);
            else if (key == "cn2") cfg.channel.turbulence.cn2 = parse_double(value, key, line_no);
            else if (key == "outer_scale")
                cfg.channel.turbulence.outer_scale = parse_double(value, key, line_no);
            else if (key == "inner_scale")
                cfg.channel.turbulence.inner_scale = parse_double(value, key, line_no);
            else if (key == "screens")
                cfg.channel.turbulence.screen_count = parse_int(value, key, line_no);
            else if (key == "turb_seed") {
                cfg.channel.turbulence.seed = parse_u64(value, key, line_no);
                turb_seed_set = true;
            } else if (key == "tilt_rms")
                cfg.channel.tilt_rms = parse_double(value, key, line_no);
            else unknown();
        } else if (section == "detector") {
            if (key == "pixels") cfg.detector.pixels = parse_int(value, key, line_no);
            else if (key == "pitch") cfg.detector.pitch = parse_double(value, key, line_no);
            else if (key == "exposure") cfg.detector.exposure = parse_double(value, key, line_no);
            else if (key == "qe") cfg.detector.qe = parse_double(value, key, line_no);
            else if (key == "background") cfg.detector.background = parse_double(value, key, line_no);
            else if (key == "detector_seed") {
                cfg.detector.seed = parse_u64(value, key, line_no);
                det_seed_set = true;
            } else unknown();
        } else if (section == "run") {
            if (key == "master_seed") cfg.master_seed = parse_u64(value, key, line_no);
            else if (key == "frames_per_state") cfg.frames_per_state = parse_int(value, key, line_no);
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "expected_photons")
                cfg.expected_photons = parse_double(value, key, line_no);
            else unknown();
        } else if (section == "states") {
            if (key == "state") cfg.sent_states.push_back(parse_state(value, line_no));
            else unknown();
        } else {
            throw std::runtime_error("line " + std::to_string(line_no) + ": unknown section [" +
                                     section + "]");
        }
    }

    cfg.channel.wavelength = cfg.source.wavelength;
    // Seed ledger: every stream derives from master_seed unless pinned.
    if (!turb_seed_set) cfg.channel.turbulence.seed = mix64(cfg.master_seed, 0x7072ULL);
    if (!det_seed_set) cfg.detector.seed = mix64(cfg.master_seed, 0xde7ULL);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[grid]\nn = " << cfg.grid.n << "\nextent = " << cfg.grid.extent << "\n\n";
    out << "[source]\npower = " << cfg.source.power << "\nwavelength = " << cfg.source.wavelength
        << "\nslot = " << cfg.source.slot << "\nwaist = " << cfg.waist << "\n\n";
    out << "[channel]\nlength = " << cfg.channel.length
        << "\nextinction = " << cfg.channel.extinction
        << "\ncn2 = " << cfg.channel.turbulence.cn2
        << "\nouter_scale = " << cfg.channel.turbulence.outer_scale
        << "\ninner_scale = " << cfg.channel.turbulence.inner_scale
        << "\nscreens = " << cfg.channel.turbulence.screen_count
        << "\nturb_seed = " << cfg.channel.turbulence.seed
        << "\ntilt_rms = " << cfg.channel.tilt_rms << "\n\n";
    out << "[detector]\npixels = " << cfg.detector.pixels << "\npitch = " << cfg.detector.pitch
        << "\nexposure = " << cfg.detector.exposure << "\nqe = " << cfg.detector.qe
        << "\nbackground = " << cfg.detector.background
        << "\ndetector_seed = " << cfg.detector.seed << "\n\n";
    out << "[run]\nmaster_seed = " << cfg.master_seed
        << "\nframes_per_state = " << cfg.frames_per_state << "\noutput_dir = " << cfg.output_dir
        << "\nexpected_photons = " << cfg.expected_photons << "\n\n";
    out << "[states]\n";
    for (const auto& state : cfg.sent_states) {
        if (const auto* p = std::get_if<PureState>(&state)) {
            out << "state = pure ell=" << p->ell;
            if (p->p != 0) out << " p=" << p->p;
            out << "\n";
        } else {
            const auto& s = std::get<SuperpositionSpec>(state);
            out << "state = superposition ell=" << s.ell << " theta=" << s.theta;
            if (s.weight != 0.5) out << " weight=" << s.weight;
            out << "\n";
        }
    }
    return out.str();
}

std::string default_config_text() {
    return R"(# Underwater OAM link, default desk-scale reproduction setup.
# Physical defaults: 532 nm source, 55 m channel, extinction 0.16 1/m,
# 0.03 s exposure, 1 ns time slot.

[grid]
n = 256
extent = 0.1          # m

[source]
power = 1.898e-10     # W; 1.898e-19 gives the single-photon-level budget
wavelength = 532e-9   # m
slot = 1e-9           # s
waist = 0.01          # m, emitted beam waist

[channel]
length = 55           # m
extinction = 0.16     # 1/m
cn2 = 2.0e-13         # m^-2/3, calibrated default
outer_scale = 1.0     # m
inner_scale = 1e-3    # m
screens = 10
tilt_rms = 0          # rad

[detector]
pixels = 256
pitch = 3.9e-4        # m/pixel (images the full grid extent)
exposure = 0.03       # s
qe = 0.2
background = 0.01     # counts/pixel/frame

[run]
master_seed = 1
frames_per_state = 20
output_dir = out
expected_photons = 200000   # per frame; remove to derive from the photon budget

[states]
# Eight equally spaced first-order superpositions.
state = superposition ell=1 theta_deg=0
state = superposition ell=1 theta_deg=45
state = superposition ell=1 theta_deg=90
state = superposition ell=1 theta_deg=135
state = superposition ell=1 theta_deg=180
state = superposition ell=1 theta_deg=225
state = superposition ell=1 theta_deg=270
state = superposition ell=1 theta_deg=315
)";
}

}  // namespace uwoam
