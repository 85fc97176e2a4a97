// Command-line front end; talks to the library through the C interface only.

#include <plmm.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitParse = 2;
constexpr int kExitRuntime = 4;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void die(plmm_status s) {
    std::cerr << "error: " << plmm_last_error() << "\n";
    std::exit(static_cast<int>(s));
}

[[noreturn]] void die_parse(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(kExitParse);
}

[[noreturn]] void die_runtime(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(kExitRuntime);
}

void check(plmm_status s) {
    if (s != PLMM_OK) die(s);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die_runtime("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) die_runtime("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) die_runtime("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) die_runtime("rename failed: " + path);
}

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& where) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string field = text.substr(pos, comma - pos);
        const char* s = field.c_str();
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0' || end == s) die_parse(where + ": expected a number, got \"" + field + "\"");
        out.push_back(v);
        if (comma == text.size()) break;
        pos = comma + 1;
    }
    if (out.size() != expected)
        die_parse(where + ": expected " + std::to_string(expected) + " comma-separated numbers");
    return out;
}

struct ProblemSource {
    std::string spec_path;
    std::string artifact_dir;
    std::string spacing_override;

    void add_options(CLI::App* cmd, bool allow_artifact = true) {
        auto* spec = cmd->add_option("--spec", spec_path, "problem spec JSON file");
        if (allow_artifact) {
            auto* art = cmd->add_option("--artifact", artifact_dir,
                                        "previously generated artifact directory");
            spec->excludes(art);
            art->excludes(spec);
        }
        cmd->add_option("--spacing-override", spacing_override,
                        "replace the spec's base spacing, as hx,hy,hz (requires --spec)");
    }

    plmm_problem* open() const {
        if (spec_path.empty() && artifact_dir.empty())
            die_parse("one of --spec or --artifact is required");
        plmm_problem* p = nullptr;
        if (!spec_path.empty()) {
            std::string text = read_text_file(spec_path);
            if (!spacing_override.empty()) {
                const auto h = parse_numbers(spacing_override, 3, "--spacing-override");
                try {
                    nlohmann::json j = nlohmann::json::parse(text);
                    j["spacing"] = {h[0], h[1], h[2]};
                    text = j.dump(2);
                } catch (const nlohmann::json::exception&) {
                    // leave the text as is so the library reports the real error
                }
            }
            check(plmm_problem_create_from_spec_text(text.c_str(), &p));
        } else {
            if (!spacing_override.empty())
                die_parse("--spacing-override requires --spec");
            check(plmm_problem_open_artifact(artifact_dir.c_str(), &p));
        }
        return p;
    }

    // best-effort default seed from the spec (or the artifact's embedded spec)
    std::uint64_t default_seed() const {
        try {
            nlohmann::json j;
            if (!spec_path.empty()) {
                j = nlohmann::json::parse(read_text_file(spec_path));
            } else {
                j = nlohmann::json::parse(read_text_file(artifact_dir + "/metadata.json"));
                j = j.at("spec");
            }
            if (j.contains("seed") && j["seed"].is_number_unsigned())
                return j["seed"].get<std::uint64_t>();
        } catch (...) {
        }
        return 0;
    }
};

struct ProblemHandle {
    plmm_problem* p = nullptr;
    ~ProblemHandle() { plmm_problem_destroy(p); }
};

int cmd_generate(const std::string& spec_path, const std::string& out_dir,
                 const ProblemSource& src) {
    if (!src.spacing_override.empty()) {
        ProblemHandle h{src.open()};
        check(plmm_write_artifact(h.p, out_dir.c_str()));
        return 0;
    }
    check(plmm_generate(spec_path.c_str(), out_dir.c_str()));
    return 0;
}

int cmd_evaluate(const ProblemSource& src, const std::string& points_path, bool raw_psi,
                 const std::string& out_path) {
    ProblemHandle h{src.open()};

    std::vector<double> xyz;
    {
        std::istream* in = &std::cin;
        std::ifstream file;
        if (points_path != "-") {
            file.open(points_path, std::ios::binary);
            if (!file) die_runtime("cannot open points file: " + points_path);
            in = &file;
        }
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(*in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (lineno == 1 && line.find_first_not_of("xyz, \t") == std::string::npos)
                continue; // header row
            const auto v = parse_numbers(line, 3, points_path + ":" + std::to_string(lineno));
            xyz.insert(xyz.end(), v.begin(), v.end());
        }
    }
    const std::size_t n = xyz.size() / 3;

    std::vector<double> f(2 * n), psi;
    std::vector<std::uint8_t> status(n, 0);
    check(plmm_evaluate(h.p, xyz.data(), n, f.data(), status.data()));
    if (raw_psi) {
        psi.resize(2 * n);
        std::vector<std::uint8_t> status2(n, 0);
        check(plmm_evaluate_psi(h.p, xyz.data(), n, psi.data(), status2.data()));
    }

    std::ostringstream out;
    out << (raw_psi ? "x,y,z,psi1,psi2,f1,f2,status" : "x,y,z,f1,f2,status") << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << fmt17(xyz[3 * i]) << ',' << fmt17(xyz[3 * i + 1]) << ',' << fmt17(xyz[3 * i + 2])
            << ',';
        if (raw_psi) out << fmt17(psi[2 * i]) << ',' << fmt17(psi[2 * i + 1]) << ',';
        out << fmt17(f[2 * i]) << ',' << fmt17(f[2 * i + 1]) << ','
            << static_cast<int>(status[i]) << '\n';
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_text_file(out_path, out.str());
    return 0;
}

int cmd_slice(const ProblemSource& src, double z, const std::string& out_path) {
    ProblemHandle h{src.open()};
    check(plmm_slice_csv(h.p, z, out_path.c_str()));
    return 0;
}

int cmd_analyze(const ProblemSource& src, const std::string& out_dir, bool strict) {
    ProblemHandle h{src.open()};
    int32_t modes = 0, depth = 0;
    uint64_t signatures = 0;
    check(plmm_analyze(h.p, out_dir.c_str(), strict ? 1 : 0, &modes, &signatures, &depth));
    std::cout << "modes=" << modes << " signatures=" << signatures << " depth=" << depth << "\n";
    return 0;
}

int cmd_solve(const ProblemSource& src, const std::string& start_text,
              std::optional<std::uint64_t> seed_opt, int runs, const std::string& out_path) {
    ProblemHandle h{src.open()};
    const auto s = parse_numbers(start_text, 3, "--start");
    const double start[3] = {s[0], s[1], s[2]};
    const std::uint64_t seed0 = seed_opt ? *seed_opt : src.default_seed();

    std::ostringstream out;
    if (runs == 1) {
        plmm_trajectory* t = nullptr;
        check(plmm_solve(h.p, start, seed0, &t));
        out << "step,x,y,z,f1,f2\n";
        for (std::size_t i = 0; i < plmm_trajectory_length(t); ++i) {
            double p[3], f[2];
            check(plmm_trajectory_step(t, i, p, f));
            out << i << ',' << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(p[2]) << ','
                << fmt17(f[0]) << ',' << fmt17(f[1]) << '\n';
        }
        plmm_trajectory_destroy(t);
    } else {
        out << "run,seed,iterations,steps,x,y,z,f1,f2,terminal_modes\n";
        for (int r = 0; r < runs; ++r) {
            const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(r);
            plmm_trajectory* t = nullptr;
            check(plmm_solve(h.p, start, seed, &t));
            const std::size_t len = plmm_trajectory_length(t);
            double p[3], f[2];
            check(plmm_trajectory_step(t, len - 1, p, f));
            std::size_t nmodes = 0;
            plmm_trajectory_terminal_modes(t, nullptr, 0, &nmodes);
            std::vector<int32_t> modes(nmodes);
            plmm_trajectory_terminal_modes(t, modes.data(), nmodes, &nmodes);
            out << r << ',' << seed << ',' << plmm_trajectory_iterations(t) << ',' << len << ','
                << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(p[2]) << ',' << fmt17(f[0])
                << ',' << fmt17(f[1]) << ',';
            for (std::size_t k = 0; k < modes.size(); ++k) {
                if (k) out << '|';
                out << modes[k];
            }
            out << '\n';
            plmm_trajectory_destroy(t);
        }
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_text_file(out_path, out.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise-linear multimodal benchmark problems"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "compose a problem and write its artifact bundle");
    ProblemSource gen_src;
    std::string gen_out;
    gen->add_option("--spec", gen_src.spec_path, "problem spec JSON file")->required();
    gen->add_option("--spacing-override", gen_src.spacing_override,
                    "replace the spec's base spacing, as hx,hy,hz");
    gen->add_option("--out", gen_out, "artifact output directory")->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "evaluate the objectives at points from a CSV");
    ProblemSource ev_src;
    std::string ev_points = "-", ev_out;
    bool ev_raw = false;
    ev_src.add_options(ev);
    ev->add_option("--points", ev_points, "points CSV (x,y,z per line), - for stdin");
    ev->add_flag("--raw-psi", ev_raw, "include the pre-transform landscape values");
    ev->add_option("--out", ev_out, "output CSV path (default: stdout)");

    // slice
    auto* sl = app.add_subcommand("slice", "export a constant-z cross-section table");
    ProblemSource sl_src;
    std::string sl_out;
    double sl_z = 0.0;
    sl_src.add_options(sl);
    sl->add_option("--z", sl_z, "slice height")->required();
    sl->add_option("--out", sl_out, "output CSV path")->required();

    // analyze
    auto* an = app.add_subcommand("analyze", "mode decomposition and hierarchy tables");
    ProblemSource an_src;
    std::string an_out;
    bool an_strict = false;
    an_src.add_options(an);
    an->add_option("--out", an_out, "output directory")->required();
    an->add_flag("--strict", an_strict, "use strict descent (no sideways moves)");

    // solve
    auto* so = app.add_subcommand("solve", "run the stochastic descent solver");
    ProblemSource so_src;
    std::string so_start, so_out;
    int so_runs = 1;
    std::optional<std::uint64_t> so_seed;
    so_src.add_options(so);
    so->add_option("--start", so_start, "start point, as x,y,z")->required();
    so->add_option("--seed", so_seed, "base RNG seed (default: the spec's seed)");
    so->add_option("--runs", so_runs, "number of runs; run r uses seed+r")
        ->check(CLI::PositiveNumber);
    so->add_option("--out", so_out, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    if (gen->parsed()) return cmd_generate(gen_src.spec_path, gen_out, gen_src);
    if (ev->parsed()) return cmd_evaluate(ev_src, ev_points, ev_raw, ev_out);
    if (sl->parsed()) return cmd_slice(sl_src, sl_z, sl_out);
    if (an->parsed()) return cmd_analyze(an_src, an_out, an_strict);
    if (so->parsed()) return cmd_solve(so_src, so_start, so_seed, so_runs, so_out);
    return 0;
}
