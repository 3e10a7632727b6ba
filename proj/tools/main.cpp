// gibbslab command-line front end: exact oracles, samplers, inequality
// checks and figure generation. Every run is a pure function of
// (config, seed): payload files carry no timestamps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbslab/exact.hpp"
#include "gibbslab/experiments.hpp"
#include "gibbslab/inequalities.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/random_cluster.hpp"
#include "gibbslab/samplers.hpp"
#include "gibbslab/steiner.hpp"
#include "gibbslab/svg.hpp"

using namespace gibbslab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;   // theorem-backed inequality violated
constexpr int kExitConfig = 2;      // bad configuration or caps
constexpr int kExitRuntime = 3;     // everything else

struct CommonSpec {
    std::string box = "3x3";
    std::string bc = "free";
    int q = 2;
    double beta = 1.0;
    std::string config_path;
    std::string out_dir;
    int threads = 0;
};

std::vector<int> parse_sides(const std::string& spec) {
    std::vector<int> sides;
    std::string cur;
    for (char c : spec + "x") {
        if (c == 'x' || c == 'X') {
            if (cur.empty()) throw std::invalid_argument("bad box spec: " + spec);
            sides.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (sides.empty()) throw std::invalid_argument("bad box spec: " + spec);
    return sides;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

BoundaryCondition parse_bc(const Box& box, const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "free") return BoundaryCondition::free_boundary(box);
    if (kind == "pure")
        return BoundaryCondition::pure(box, arg.empty() ? 1 : std::stoi(arg));
    if (kind == "dobrushin") {
        int height = arg.empty() ? 0 : std::stoi(arg);
        return BoundaryCondition::dobrushin(box, box.dimension() - 1, height,
                                            2, 1);
    }
    if (kind == "one-step") return BoundaryCondition::one_step(box);
    if (kind == "quadrant") {
        auto cs = parse_int_list(arg.empty() ? "1,2,3,4" : arg);
        if (cs.size() != 4)
            throw std::invalid_argument("quadrant bc needs 4 colors");
        return BoundaryCondition::quadrant(box, {cs[0], cs[1], cs[2], cs[3]});
    }
    if (kind == "file") {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot open bc file " + arg);
        nlohmann::json j;
        in >> j;
        return bc_from_json(box, j);
    }
    throw std::invalid_argument("unknown bc spec: " + spec);
}

struct Resolved {
    Box box;
    BoundaryCondition bc;
    ModelParams params;
    nlohmann::json config;
    fs::path out;
};

Resolved resolve(const CommonSpec& spec) {
    nlohmann::json cfg;
    if (!spec.config_path.empty()) {
        std::ifstream in(spec.config_path);
        if (!in)
            throw std::invalid_argument("cannot open config " +
                                        spec.config_path);
        in >> cfg;
        if (cfg.value("schema_version", 1) != 1)
            throw std::invalid_argument("unsupported config schema version");
    }
    Box box = cfg.contains("box") ? box_from_json(cfg.at("box"))
                                  : centered_box(parse_sides(spec.box));
    ModelParams params(cfg.contains("model")
                           ? ModelParams(cfg.at("model").value("q", spec.q),
                                         cfg.at("model").value("beta", spec.beta))
                           : ModelParams(spec.q, spec.beta));
    BoundaryCondition bc = cfg.contains("bc") ? bc_from_json(box, cfg.at("bc"))
                                              : parse_bc(box, spec.bc);
    std::string out_dir = spec.out_dir;
    if (out_dir.empty()) {
        const char* env = std::getenv("GIBBSLAB_OUT_DIR");
        out_dir = env ? env : "out";
    }
    nlohmann::json resolved = {{"schema_version", 1},
                               {"box", box_to_json(box)},
                               {"bc", bc_to_json(box, bc)},
                               {"model", {{"q", params.q}, {"beta", params.beta}}}};
    return Resolved{std::move(box), std::move(bc), params, std::move(resolved),
                    fs::path(out_dir)};
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    const char* env = std::getenv("GIBBSLAB_THREADS");
    if (env) return std::max(1, std::atoi(env));
    return 0;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

// ---- exact ----

int cmd_exact(const CommonSpec& spec, const std::string& dlr_subbox,
              int threads) {
    auto r = resolve(spec);
    fs::create_directories(r.out);
    EnumerationLimits limits;
    limits.threads = resolve_threads(threads);
    auto m = ExactMeasure::enumerate(r.box, r.bc, r.params, limits);
    auto marginals = m.site_marginals();

    std::ofstream csv(r.out / "marginals.csv");
    csv << "site,color,probability\n";
    char buf[64];
    for (std::int32_t i = 0; i < r.box.interior_count(); ++i) {
        std::string site;
        for (int c : r.box.interior_coord(i))
            site += (site.empty() ? "" : ";") + std::to_string(c);
        for (int c = 1; c <= r.params.q; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g",
                          marginals[static_cast<std::size_t>(i) * r.params.q +
                                    c - 1]);
            csv << site << "," << c << "," << buf << "\n";
        }
    }

    nlohmann::json summary = {{"log_partition", m.log_partition()},
                              {"states", m.state_count()},
                              {"config", r.config}};
    if (!dlr_subbox.empty()) {
        auto sub = centered_box(parse_sides(dlr_subbox));
        double disc = dlr_check(r.box, r.bc, r.params, sub, limits);
        summary["dlr_max_discrepancy"] = disc;
        std::cout << "dlr max discrepancy: " << disc << "\n";
    }
    write_json(r.out / "summary.json", summary);
    std::cout << "logZ = " << m.log_partition() << " over " << m.state_count()
              << " states -> " << (r.out / "marginals.csv").string() << "\n";
    return kExitOk;
}

// ---- sample ----

struct SampleFlags {
    bool sweeps_set = false, chains_set = false, seed_set = false,
         sampler_set = false;
};

int cmd_sample(const CommonSpec& spec, std::int64_t sweeps, int chains,
               std::uint64_t seed, std::int64_t burn_in, std::string sampler,
               bool snapshot, bool profile, int threads,
               const SampleFlags& set) {
    auto r = resolve(spec);
    // a config file fully determines the run; explicit flags override it
    if (!spec.config_path.empty()) {
        std::ifstream in(spec.config_path);
        nlohmann::json cfg;
        in >> cfg;
        if (!set.sweeps_set) sweeps = cfg.value("sweeps", sweeps);
        if (!set.chains_set) chains = cfg.value("chains", chains);
        if (!set.seed_set) seed = cfg.value("seed", seed);
        if (!set.sampler_set) sampler = cfg.value("sampler", sampler);
    }
    fs::create_directories(r.out);
    RunOptions opts;
    opts.n_sweeps = sweeps;
    opts.n_chains = chains;
    opts.seed = seed;
    opts.burn_in = burn_in;
    opts.threads = resolve_threads(threads);
    opts.batch_csv_path = (r.out / "batches.csv").string();
    auto kind = sampler_from_name(sampler);

    nlohmann::json cfg = r.config;
    cfg["sampler"] = sampler;
    cfg["sweeps"] = sweeps;
    cfg["chains"] = chains;
    cfg["seed"] = seed;
    write_json(r.out / "config.json", cfg);

    if (profile) {
        bool split = r.bc.descriptor().value("kind", "") == "one_step";
        auto res = interface_profile(r.box, r.bc, r.params, opts, split);
        write_profile_csv((r.out / "profile.csv").string(), res);
        if (snapshot && !res.final_configs.empty()) {
            auto doc = svg::render_spin_slice(r.box, res.final_configs[0]);
            doc.write((r.out / "snapshot.svg").string());
        }
        std::cout << "profile -> " << (r.out / "profile.csv").string() << "\n";
        return kExitOk;
    }

    // default observables: per-color density plus +-1 magnetization (q=2)
    std::vector<Observable> obs;
    for (int c = 1; c <= r.params.q; ++c)
        obs.push_back(Observable{
            "density_" + std::to_string(c), [c](const SpinConfig& s) {
                double acc = 0;
                for (std::int32_t i = 0; i < s.size(); ++i)
                    acc += s.value(i) == c;
                return acc / s.size();
            }});
    if (r.params.q == 2)
        obs.push_back(Observable{"magnetization", [](const SpinConfig& s) {
                                     double acc = 0;
                                     for (std::int32_t i = 0; i < s.size(); ++i)
                                         acc += s.value(i) == 2 ? 1.0 : -1.0;
                                     return acc / s.size();
                                 }});
    auto run = run_experiment(kind, r.box, r.bc, r.params, obs, opts);
    write_estimates_csv((r.out / "estimates.csv").string(), run.estimates);
    if (snapshot && !run.final_configs.empty()) {
        auto doc = svg::render_spin_slice(r.box, run.final_configs[0]);
        doc.write((r.out / "snapshot.svg").string());
    }
    for (const auto& e : run.estimates)
        std::cout << e.name << " = " << e.mean << " +- " << e.stderr_of_mean
                  << " (tau_int " << e.tau_int << ")\n";
    std::cout << "estimates -> " << (r.out / "estimates.csv").string() << "\n";
    return kExitOk;
}

// ---- check ----

void print_report_line(const InequalityReport& rep) {
    std::cout << rep.inequality_id << " | " << rep.instance << " | slack "
              << rep.slack;
    if (rep.method == "mc") std::cout << " +- " << rep.stderr_of_slack;
    std::cout << " | " << rep.verdict << "\n";
}

int check_fkg_mixture(const std::string& box_spec, double beta, int z,
                      const fs::path& out) {
    auto box = centered_box(parse_sides(box_spec));
    auto rep = mixture_conditional_witness(box, ModelParams(2, beta), z);
    std::cout << "mixture witness: conditional " << rep.conditional
              << " vs ceiling " << rep.ceiling << " (marginal " << rep.marginal
              << ", method " << rep.method << ") -> "
              << (rep.witness ? "witness" : "no witness") << "\n";
    fs::create_directories(out);
    write_json(out / "witness.json", rep.to_json());
    return kExitOk;
}

int check_potts_mixture(const std::string& box_spec, int q, double beta, int z,
                        const fs::path& out) {
    auto box = centered_box(parse_sides(box_spec));
    auto rep = potts_dobrushin_witness(box, ModelParams(q, beta), z);
    std::cout << "potts witness: conditional " << rep.conditional
              << " vs bicolor ceiling " << rep.ceiling << " (method "
              << rep.method << ") -> "
              << (rep.witness ? "witness" : "no witness") << "\n";
    fs::create_directories(out);
    write_json(out / "witness.json", rep.to_json());
    return kExitOk;
}

int check_vdberg_random(int n_instances, std::uint64_t seed,
                        const fs::path& out) {
    PhiloxRng rng(seed, 0xdbe6);
    std::vector<nlohmann::json> lines;
    int violations = 0;
    int done = 0;
    while (done < n_instances) {
        Graph g;
        g.n_vertices = 4 + static_cast<int>(rng.uniform_below(4));
        int want = 4 + static_cast<int>(rng.uniform_below(10));
        for (int e = 0; e < want; ++e) {
            auto u = static_cast<std::int32_t>(
                rng.uniform_below(static_cast<std::uint32_t>(g.n_vertices)));
            auto v = static_cast<std::int32_t>(
                rng.uniform_below(static_cast<std::uint32_t>(g.n_vertices)));
            bool dup = u == v;
            for (auto& [a, b] : g.edges)
                dup |= (a == std::min(u, v) && b == std::max(u, v));
            if (!dup && g.edge_count() < 14)
                g.add_edge(std::min(u, v), std::max(u, v));
        }
        if (g.edge_count() < 2) continue;
        std::vector<std::int32_t> s = {0}, t = {1};
        if (g.n_vertices >= 6 && rng.uniform_below(2)) {
            s.push_back(2);
            t.push_back(3);
        }
        double qv = std::vector<double>{1.0, 1.5, 2.0, 3.0}[rng.uniform_below(4)];
        double pv = 0.1 + 0.1 * rng.uniform_below(9);
        double a = 0.25 * rng.uniform_below(5), b = 0.25 * rng.uniform_below(5);
        auto x = static_cast<std::int32_t>(
            rng.uniform_below(static_cast<std::uint32_t>(g.n_vertices)));
        auto y = static_cast<std::int32_t>(
            rng.uniform_below(static_cast<std::uint32_t>(g.n_vertices)));
        auto mono = [&g, s, t](double wa, double wb, std::int32_t vx,
                               std::int32_t vy) -> ClusterFunctional {
            return [=, &g](const ClusterView& cv) {
                auto touches = [&](const std::vector<std::int32_t>& set,
                                   std::int32_t v) {
                    for (auto w : set)
                        if (cv.connected(w, v)) return true;
                    return false;
                };
                double val = 0;
                if (touches(s, vx)) val += wa;
                if (touches(t, vy)) val -= wb;
                return val;
            };
        };
        auto f = mono(a, b, x, y);
        auto h = mono(b, a, y, x);
        auto rep = check_vdberg(g, qv, pv, s, t, f, h, {}, false);
        lines.push_back(rep.to_json());
        if (rep.verdict == "violated") {
            ++violations;
            print_report_line(rep);
        }
        ++done;
    }
    fs::create_directories(out);
    std::ofstream jl(out / "vdberg.jsonl");
    for (auto& l : lines) jl << l.dump() << "\n";
    std::cout << done << " random conditional-association instances, "
              << violations << " violations\n";
    return violations == 0 ? kExitOk : kExitViolation;
}

int check_corr_ab_free(int n_instances, int q_max, std::uint64_t seed,
                       const fs::path& out) {
    PhiloxRng rng(seed, 0xab);
    std::vector<nlohmann::json> lines;
    int violations = 0;
    for (int k = 0; k < n_instances; ++k) {
        int w = 2 + static_cast<int>(rng.uniform_below(2));
        int h = 2 + static_cast<int>(rng.uniform_below(2));
        auto box = Box::make(2, {{0, w - 1}, {0, h - 1}});
        int q = 2 + static_cast<int>(rng.uniform_below(
                        static_cast<std::uint32_t>(q_max - 1)));
        double beta = 0.2 * (1 + rng.uniform_below(12));
        auto pick = [&](int n) {
            std::vector<std::vector<int>> sites;
            for (int i = 0; i < n; ++i)
                sites.push_back({static_cast<int>(rng.uniform_below(
                                     static_cast<std::uint32_t>(w))),
                                 static_cast<int>(rng.uniform_below(
                                     static_cast<std::uint32_t>(h)))});
            return sites;
        };
        auto a = pick(1 + static_cast<int>(rng.uniform_below(2)));
        auto b = pick(1 + static_cast<int>(rng.uniform_below(2)));
        int ci = 1 + static_cast<int>(
                         rng.uniform_below(static_cast<std::uint32_t>(q)));
        int cj = 1 + (ci % q);
        auto rab =
            check_schonmann_ab(box, BoundaryCondition::free_boundary(box),
                               ModelParams(q, beta), a, b, ci, cj);
        auto raa =
            check_schonmann_aa(box, BoundaryCondition::free_boundary(box),
                               ModelParams(q, beta), a, b, ci);
        lines.push_back(rab.to_json());
        lines.push_back(raa.to_json());
        for (const auto* rep : {&rab, &raa})
            if (rep->verdict == "violated") {
                ++violations;
                print_report_line(*rep);
            }
    }
    fs::create_directories(out);
    std::ofstream jl(out / "corr_free.jsonl");
    for (auto& l : lines) jl << l.dump() << "\n";
    std::cout << n_instances << " free-boundary instances (ab and aa), "
              << violations << " violations\n";
    return violations == 0 ? kExitOk : kExitViolation;
}

int check_bicolor_random(int n_instances, std::uint64_t seed,
                         const fs::path& out) {
    PhiloxRng rng(seed, 0xb1c0);
    std::vector<nlohmann::json> lines;
    int violations = 0;
    for (int k = 0; k < n_instances; ++k) {
        int w = 2 + static_cast<int>(rng.uniform_below(2));
        int h = 2 + static_cast<int>(rng.uniform_below(2));
        auto box = Box::make(2, {{0, w - 1}, {0, h - 1}});
        int q = 2 + static_cast<int>(rng.uniform_below(3));
        int ci = 1 + static_cast<int>(
                         rng.uniform_below(static_cast<std::uint32_t>(q)));
        int cj = 1 + (ci % q);
        std::vector<std::uint8_t> bv(
            static_cast<std::size_t>(box.boundary_count()));
        for (auto& v : bv) {
            switch (rng.uniform_below(3)) {
                case 0: v = 0; break;
                case 1: v = static_cast<std::uint8_t>(ci); break;
                default: v = static_cast<std::uint8_t>(cj); break;
            }
        }
        auto bc = BoundaryCondition::from_values(box, bv);
        double beta = 0.2 * (1 + rng.uniform_below(12));
        auto a = std::vector<std::vector<int>>{
            {static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(w))),
             static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(h)))}};
        auto b = std::vector<std::vector<int>>{
            {static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(w))),
             static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(h)))}};
        auto rep = check_bicolor(box, bc, ModelParams(q, beta), a, b, ci, cj);
        lines.push_back(rep.to_json());
        if (rep.verdict == "violated") {
            ++violations;
            print_report_line(rep);
        }
    }
    fs::create_directories(out);
    std::ofstream jl(out / "bicolor.jsonl");
    for (auto& l : lines) jl << l.dump() << "\n";
    std::cout << n_instances << " bicolor instances, " << violations
              << " violations\n";
    return violations == 0 ? kExitOk : kExitViolation;
}

int check_corr_ab_search(int q, int size, double beta, int chains,
                         std::int64_t sweeps, std::uint64_t seed,
                         const fs::path& out) {
    auto box = centered_box({size, size});
    std::array<int, 4> colors = {1, 2, 3, 4};
    if (q == 3) colors = {1, 2, 3, 2};
    auto bc = BoundaryCondition::quadrant(box, colors);
    auto st = steiner::steiner_tree_square(steiner::Norm2D::euclidean(), 1.0);
    auto mask1 = steiner::symmetric_difference_regions(
        st.vertical, st.horizontal, colors, 1, 64);
    auto mask3 = steiner::symmetric_difference_regions(
        st.vertical, st.horizontal, colors, 3, 64);
    if (mask1.a_only.empty() || mask3.a_only.empty()) {
        std::cout << "degenerate Steiner masks for this color map; "
                     "not found\n";
        return kExitOk;
    }
    auto px = steiner::deepest_point(mask1.a_only, st.vertical, st.horizontal);
    auto py = steiner::deepest_point(mask3.a_only, st.vertical, st.horizontal);
    auto sx = steiner::site_from_unit(box, px);
    auto sy = steiner::site_from_unit(box, py);
    RunOptions opts;
    opts.n_sweeps = sweeps;
    opts.n_chains = chains;
    opts.seed = seed;
    opts.burn_in = sweeps / 5;
    auto rep = check_corr_ab_mc(box, bc, ModelParams(q, beta), sx, sy, 1, 3,
                                SamplerKind::SwendsenWang, opts);
    print_report_line(rep);
    fs::create_directories(out);
    write_json(out / "search.json", rep.to_json());
    auto fig = steiner::render_svg(st, mask1.a_only, mask3.a_only);
    std::ofstream svg_out(out / "steiner.svg");
    svg_out << fig;
    std::cout << (rep.verdict == "violated"
                      ? "counter-example found (4-sigma)"
                      : "not found within this instance")
              << " at sites (" << sx[0] << "," << sx[1] << ") / (" << sy[0]
              << "," << sy[1] << ")\n";
    return kExitOk;
}

int cmd_steiner(const std::string& norm_spec, double side,
                const std::string& svg_path) {
    steiner::Norm2D norm = steiner::Norm2D::euclidean();
    if (norm_spec.rfind("elliptic:", 0) == 0) {
        auto arg = norm_spec.substr(9);
        auto comma = arg.find(',');
        norm = steiner::Norm2D::elliptic(std::stod(arg.substr(0, comma)),
                                         std::stod(arg.substr(comma + 1)));
    } else if (norm_spec != "euclidean") {
        throw std::invalid_argument("unknown norm: " + norm_spec);
    }
    auto res = steiner::steiner_tree_square(norm, side);
    std::cout << "vertical  " << res.vertical.length << "\n"
              << "horizontal " << res.horizontal.length << "\n"
              << "three sides " << res.three_sides_length << "\n"
              << "shorter tree beats the spanning path: "
              << (res.shorter().length < res.three_sides_length ? "yes" : "no")
              << "\n";
    if (!svg_path.empty()) {
        std::ofstream out(svg_path);
        out << steiner::render_svg(res);
        std::cout << "figure -> " << svg_path << "\n";
    }
    return kExitOk;
}

int cmd_scan(int d, double beta, const std::string& sizes_csv,
             std::uint64_t seed, std::int64_t sweeps, const fs::path& out) {
    auto sizes = parse_int_list(sizes_csv);
    auto table = localization_scan(d, beta, sizes, seed, sweeps);
    for (const auto& r : table.rows)
        std::cout << "n=" << r.size << " var_h=" << r.var_h << " +- "
                  << r.stderr_var << "\n";
    fs::create_directories(out);
    write_json(out / "localization.json", table.to_json());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice Gibbs measures: exact oracles, cluster samplers, "
                 "correlation-inequality harness"};
    app.require_subcommand(1);

    CommonSpec spec;
    std::string dlr_subbox;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--box", spec.box, "box sides, e.g. 2x2x6 (centered)");
        cmd->add_option("--bc", spec.bc,
                        "free|pure:i|dobrushin[:h]|one-step|quadrant:a,b,c,d|"
                        "file:path");
        cmd->add_option("--q", spec.q, "number of colors");
        cmd->add_option("--beta", spec.beta, "inverse temperature");
        cmd->add_option("--config", spec.config_path, "config JSON");
        cmd->add_option("--out", spec.out_dir, "output directory");
        cmd->add_option("--threads", threads, "worker cap");
    };

    auto* exact = app.add_subcommand("exact", "exact probabilities and logZ");
    add_common(exact);
    exact->add_option("--dlr-subbox", dlr_subbox,
                      "also run the consistency check on this centered subbox");

    auto* sample = app.add_subcommand("sample", "Monte Carlo estimates");
    add_common(sample);
    std::int64_t sweeps = 20000, burn_in = -1;
    int chains = 4;
    std::uint64_t seed = 1;
    std::string sampler = "sw";
    bool snapshot = false, profile = false;
    sample->add_option("--sweeps", sweeps);
    sample->add_option("--chains", chains);
    sample->add_option("--seed", seed);
    sample->add_option("--burn-in", burn_in, "-1 = automatic");
    sample->add_option("--sampler", sampler, "heatbath|sw|wolff");
    sample->add_flag("--svg", snapshot, "write a configuration snapshot");
    sample->add_flag("--profile", profile,
                     "layer profile + interface height field");

    auto* check = app.add_subcommand("check", "inequality checks and searches");
    std::string ineq;
    check->add_option("id", ineq,
                      "fkg-mixture|potts-mixture|vdberg|corr-ab|bicolor|"
                      "corr-ab-search")
        ->required();
    add_common(check);
    int n_random = 100, z_site = 1, search_size = 48;
    std::int64_t search_sweeps = 8000;
    int search_chains = 48;
    check->add_option("--random", n_random, "number of random instances");
    check->add_option("--z", z_site, "witness height");
    check->add_option("--size", search_size, "square side for the search");
    check->add_option("--search-sweeps", search_sweeps);
    check->add_option("--search-chains", search_chains);
    check->add_option("--seed", seed);

    auto* steiner_cmd = app.add_subcommand("steiner", "square Steiner trees");
    std::string norm_spec = "euclidean", svg_path;
    double side = 1.0;
    steiner_cmd->add_option("--norm", norm_spec, "euclidean|elliptic:a,b");
    steiner_cmd->add_option("--side", side);
    steiner_cmd->add_option("--svg", svg_path, "write the figure here");

    auto* scan = app.add_subcommand("scan", "interface localization scan");
    int scan_d = 3;
    std::string scan_sizes = "8,12,16";
    scan->add_option("--d", scan_d, "dimension (2 or 3)");
    scan->add_option("--beta", spec.beta);
    scan->add_option("--sizes", scan_sizes);
    scan->add_option("--seed", seed);
    scan->add_option("--sweeps", sweeps);
    scan->add_option("--out", spec.out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        fs::path out = spec.out_dir.empty()
                           ? fs::path(std::getenv("GIBBSLAB_OUT_DIR")
                                          ? std::getenv("GIBBSLAB_OUT_DIR")
                                          : "out")
                           : fs::path(spec.out_dir);
        if (exact->parsed()) return cmd_exact(spec, dlr_subbox, threads);
        if (sample->parsed()) {
            SampleFlags set;
            set.sweeps_set = sample->count("--sweeps") > 0;
            set.chains_set = sample->count("--chains") > 0;
            set.seed_set = sample->count("--seed") > 0;
            set.sampler_set = sample->count("--sampler") > 0;
            return cmd_sample(spec, sweeps, chains, seed, burn_in, sampler,
                              snapshot, profile, threads, set);
        }
        if (steiner_cmd->parsed()) return cmd_steiner(norm_spec, side, svg_path);
        if (scan->parsed())
            return cmd_scan(scan_d, spec.beta, scan_sizes, seed, sweeps, out);
        if (check->parsed()) {
            if (ineq == "fkg-mixture")
                return check_fkg_mixture(spec.box, spec.beta, z_site, out);
            if (ineq == "potts-mixture")
                return check_potts_mixture(spec.box, spec.q, spec.beta, z_site,
                                           out);
            if (ineq == "vdberg") return check_vdberg_random(n_random, seed, out);
            if (ineq == "corr-ab")
                return check_corr_ab_free(n_random, std::max(2, spec.q), seed,
                                          out);
            if (ineq == "bicolor")
                return check_bicolor_random(n_random, seed, out);
            if (ineq == "corr-ab-search")
                return check_corr_ab_search(spec.q, search_size, spec.beta,
                                            search_chains, search_sweeps, seed,
                                            out);
            std::cerr << "unknown inequality id: " << ineq << "\n";
            return kExitConfig;
        }
        return kExitConfig;
    } catch (const CapExceeded& e) {
        std::cerr << "cap error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
