#include "afv/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

namespace afv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

struct Parser {
    std::string file;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError(file + ":" + std::to_string(line) + ": " + msg);
    }

    double number(const std::string& v) const {
        try {
            std::size_t consumed = 0;
            const double out = std::stod(v, &consumed);
            if (consumed != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
    }

    int integer(const std::string& v) const {
        int out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            fail("expected an integer, got '" + v + "'");
        }
        return out;
    }

    std::uint64_t unsigned64(const std::string& v) const {
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            fail("expected an unsigned integer, got '" + v + "'");
        }
        return out;
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail("expected true/false, got '" + v + "'");
    }
};

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());

    PipelineConfig cfg;
    Parser p{path.filename().string(), 0};
    std::string section;
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        std::string line = trim(raw);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "flow" && section != "normalization" && section != "gate" &&
                section != "dots" && section != "noise" && section != "io" &&
                section != "provenance") {
                p.fail("unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (section.empty()) p.fail("key '" + key + "' appears before any [section]");

        if (section == "flow") {
            if (key == "pyramid_scale") cfg.flow.pyramid_scale = p.number(value);
            else if (key == "levels") cfg.flow.levels = p.integer(value);
            else if (key == "window") cfg.flow.window = p.integer(value);
            else if (key == "iterations") cfg.flow.iterations = p.integer(value);
            else if (key == "poly_n") cfg.flow.poly_n = p.integer(value);
            else if (key == "poly_sigma") cfg.flow.poly_sigma = p.number(value);
            else p.fail("unknown key '" + key + "' in [flow]");
        } else if (section == "normalization") {
            if (key == "p_train") cfg.normalization.p_train = p.number(value);
            else if (key == "mix_weight") cfg.normalization.mix_weight = p.number(value);
            else if (key == "offset_fraction") cfg.normalization.offset_fraction = p.number(value);
            else if (key == "saturation") cfg.normalization.saturation = p.number(value);
            else p.fail("unknown key '" + key + "' in [normalization]");
        } else if (section == "gate") {
            if (key == "enabled") cfg.gate_enabled = p.boolean(value);
            else if (key == "epsilon") cfg.gate.epsilon = p.number(value);
            else if (key == "window") cfg.gate.window = p.integer(value);
            else if (key == "tau") cfg.gate.tau = p.number(value);
            else if (key == "r_min") cfg.gate.r_min = p.number(value);
            else if (key == "beta") cfg.gate.beta = p.number(value);
            else if (key == "lambda") cfg.gate.lambda = p.number(value);
            else p.fail("unknown key '" + key + "' in [gate]");
        } else if (section == "dots") {
            if (key == "count") cfg.dots.count = p.integer(value);
            else if (key == "lifetime") cfg.dots.lifetime = p.integer(value);
            else if (key == "radius") cfg.dots.radius = p.integer(value);
            else if (key == "seed") cfg.dots.seed = p.unsigned64(value);
            else p.fail("unknown key '" + key + "' in [dots]");
        } else if (section == "noise") {
            if (key == "seed") cfg.noise.seed = p.unsigned64(value);
            else p.fail("unknown key '" + key + "' in [noise]");
        } else if (section == "io") {
            if (key == "frame_pattern") cfg.io.frame_pattern = value;
            else if (key == "flow_pattern") cfg.io.flow_pattern = value;
            else p.fail("unknown key '" + key + "' in [io]");
        } else {  // provenance: free-form notes
            cfg.provenance.push_back({key, value});
        }
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const PipelineConfig& cfg) {
    if (!(cfg.flow.pyramid_scale > 0.0 && cfg.flow.pyramid_scale < 1.0)) {
        throw ValidationError("config: flow.pyramid_scale must be in (0,1)");
    }
    if (cfg.flow.levels < 1 || cfg.flow.iterations < 1) {
        throw ValidationError("config: flow.levels and flow.iterations must be >= 1");
    }
    if (cfg.flow.window < 1 || cfg.flow.window % 2 == 0) {
        throw ValidationError("config: flow.window must be odd and >= 1");
    }
    if (cfg.flow.poly_n < 3 || cfg.flow.poly_n % 2 == 0) {
        throw ValidationError("config: flow.poly_n must be odd and >= 3");
    }
    if (!(cfg.flow.poly_sigma > 0.0)) {
        throw ValidationError("config: flow.poly_sigma must be > 0");
    }
    if (!(cfg.normalization.mix_weight >= 0.0 && cfg.normalization.mix_weight <= 1.0)) {
        throw ValidationError("config: normalization.mix_weight must be in [0,1]");
    }
    if (!(cfg.normalization.offset_fraction >= 0.0 && cfg.normalization.offset_fraction < 1.0)) {
        throw ValidationError("config: normalization.offset_fraction must be in [0,1)");
    }
    if (!(cfg.normalization.saturation >= 0.0 && cfg.normalization.saturation <= 1.0)) {
        throw ValidationError("config: normalization.saturation must be in [0,1]");
    }
    if (cfg.normalization.p_train < 0.0) {
        throw ValidationError("config: normalization.p_train must be >= 0");
    }
    validate_gate_params(cfg.gate);
    if (cfg.dots.count < 1) throw ValidationError("config: dots.count must be >= 1");
    if (cfg.dots.lifetime < 1) throw ValidationError("config: dots.lifetime must be >= 1");
    if (cfg.dots.radius < 0) throw ValidationError("config: dots.radius must be >= 0");
}

std::string config_to_text(const PipelineConfig& c) {
    char buf[4096];
    std::string out;
    std::snprintf(buf, sizeof(buf),
                  "[flow]\n"
                  "pyramid_scale = %.17g\n"
                  "levels = %d\n"
                  "window = %d\n"
                  "iterations = %d\n"
                  "poly_n = %d\n"
                  "poly_sigma = %.17g\n"
                  "\n[normalization]\n"
                  "p_train = %.17g\n"
                  "mix_weight = %.17g\n"
                  "offset_fraction = %.17g\n"
                  "saturation = %.17g\n"
                  "\n[gate]\n"
                  "enabled = %s\n"
                  "epsilon = %.17g\n"
                  "window = %d\n"
                  "tau = %.17g\n"
                  "r_min = %.17g\n"
                  "beta = %.17g\n"
                  "lambda = %.17g\n"
                  "\n[dots]\n"
                  "count = %d\n"
                  "lifetime = %d\n"
                  "radius = %d\n"
                  "seed = %" PRIu64 "\n"
                  "\n[noise]\n"
                  "seed = %" PRIu64 "\n"
                  "\n[io]\n"
                  "frame_pattern = %s\n"
                  "flow_pattern = %s\n",
                  c.flow.pyramid_scale, c.flow.levels, c.flow.window, c.flow.iterations,
                  c.flow.poly_n, c.flow.poly_sigma, c.normalization.p_train,
                  c.normalization.mix_weight, c.normalization.offset_fraction,
                  c.normalization.saturation, c.gate_enabled ? "true" : "false",
                  c.gate.epsilon, c.gate.window, c.gate.tau, c.gate.r_min, c.gate.beta,
                  c.gate.lambda, c.dots.count, c.dots.lifetime, c.dots.radius,
                  static_cast<std::uint64_t>(c.dots.seed),
                  static_cast<std::uint64_t>(c.noise.seed), c.io.frame_pattern.c_str(),
                  c.io.flow_pattern.c_str());
    out = buf;
    if (!c.provenance.empty()) {
        out += "\n[provenance]\n";
        for (const auto& note : c.provenance) {
            out += note.key + " = " + note.value + "\n";
        }
    }
    return out;
}

}  // namespace afv
