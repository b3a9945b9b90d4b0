#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "chaincalc/format.hpp"

using namespace chaincalc;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitEngine = 3;
constexpr int kExitVerify = 4;

int default_n() {
    const char* env = std::getenv("CHAINCALC_N");
    if (env) return std::atoi(env);
    return 2;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        f << text;
    }
}

uint64_t mix(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

TwistWord random_word(const ChainConfig& cfg, uint64_t& st, size_t max_len) {
    TwistWord w;
    size_t len = 1 + mix(st) % max_len;
    for (size_t i = 0; i < len; ++i) {
        int l = 1 + static_cast<int>(mix(st) % cfg.n);
        int a = static_cast<int>(mix(st) % 6) - 3;
        if (mix(st) % 2)
            w.push_back(WordLetter::T(l, a));
        else
            w.push_back(WordLetter::Tinv(l, a));
    }
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic calculator for spherical twists on a chain of -2-curves"};
    app.require_subcommand(1);

    int n = default_n();
    std::string in_path, in2_path, out_path, word_text, level = "objects";
    uint64_t seed = 1;
    int count = 50;
    long long max_l = 40;
    bool serial = false;
    app.add_option("--n", n, "number of curves in the chain");
    app.add_flag("--serial", serial, "use the serial linear algebra kernels");

    auto add_common = [&](CLI::App* sub, bool needs_in = false) {
        sub->add_option("--in", in_path, "input file")->required(needs_in);
        sub->add_option("--out", out_path, "machine-readable output file");
    };

    auto* cmd_decompose = app.add_subcommand("decompose", "decompose a pure sheaf into Sigma(Z) atoms");
    add_common(cmd_decompose, true);

    auto* cmd_ext = app.add_subcommand("ext-table", "hom/ext table between Sigma(Z) bundles");
    int ext_window = 1, ext_len = 2;
    cmd_ext->add_option("--max-deg", ext_window, "degree window");
    cmd_ext->add_option("--max-len", ext_len, "maximal support length");
    cmd_ext->add_option("--out", out_path, "output file");

    auto* cmd_twist = app.add_subcommand("twist", "apply a twist word to an object");
    add_common(cmd_twist, true);
    cmd_twist->add_option("--word", word_text, "twist word")->required();

    auto* cmd_sph = app.add_subcommand("spherical", "sphericality test with certificate");
    add_common(cmd_sph, true);

    auto* cmd_reduce = app.add_subcommand("reduce", "reduce a spherical object to O_{C_b}(a)[i]");
    add_common(cmd_reduce, true);

    auto* cmd_pair = app.add_subcommand("reduce-pair", "normalize a pair of objects");
    cmd_pair->add_option("--in", in_path, "alpha object file")->required();
    cmd_pair->add_option("--in2", in2_path, "beta object file")->required();
    cmd_pair->add_option("--out", out_path, "output file");

    auto* cmd_factor = app.add_subcommand("factor", "factor an autoequivalence word");
    cmd_factor->add_option("--word", word_text, "twist word")->required();
    cmd_factor->add_option("--out", out_path, "output file");

    auto* cmd_rel = app.add_subcommand("relations", "verify braid and commutation relations");
    cmd_rel->add_option("--level", level, "K or objects");
    cmd_rel->add_option("--out", out_path, "output file");

    auto* cmd_fuzz = app.add_subcommand("fuzz", "randomized reduction round-trips");
    cmd_fuzz->add_option("--seed", seed, "random seed");
    cmd_fuzz->add_option("--count", count, "number of cases");
    cmd_fuzz->add_option("--max-l", max_l, "length cap on fuzzed objects");
    cmd_fuzz->add_option("--out", out_path, "output file");

    CLI11_PARSE(app, argc, argv);
    set_parallel_kernels(!serial);

    try {
        ChainConfig cfg(n);
        std::ostringstream report;
        if (app.got_subcommand(cmd_decompose)) {
            LinkedSheaf e = sheaf_from_string(slurp(in_path));
            auto parts = decompose(e);
            report << "chaincalc/1 decomposition\n";
            for (const auto& r : parts) report << r.str() << "\n";
            emit(out_path, report.str());
            std::cout << "decomposed into " << parts.size() << " atoms\n";
            for (const auto& r : parts) std::cout << "  " << r.str() << "\n";
        } else if (app.got_subcommand(cmd_ext)) {
            report << "chaincalc/1 ext-table\n";
            std::vector<SubchainLineBundle> all;
            for (int s = 1; s <= cfg.n; ++s)
                for (int t = s; t <= std::min(cfg.n, s + ext_len - 1); ++t) {
                    std::vector<int> degs(static_cast<size_t>(t - s + 1), 0);
                    std::function<void(size_t)> rec = [&](size_t i) {
                        if (i == degs.size()) {
                            all.push_back(SubchainLineBundle(s, t, degs));
                            return;
                        }
                        for (int v = -ext_window; v <= ext_window; ++v) {
                            degs[i] = v;
                            rec(i + 1);
                        }
                    };
                    rec(0);
                }
            for (const auto& r : all)
                for (const auto& s2 : all) {
                    ExtProfile p = ext_profile(cfg, r, s2);
                    report << r.str() << " " << s2.str() << " hom " << p.hom << " ext1 " << p.ext1
                           << " ext2 " << p.ext2 << " chi " << p.chi << "\n";
                }
            emit(out_path, report.str());
            if (!out_path.empty()) std::cout << "wrote " << all.size() * all.size() << " pairs\n";
            else
                std::cout << report.str();
        } else if (app.got_subcommand(cmd_twist)) {
            ChainConfig file_cfg(1);
            DerivedObject d = object_from_string(slurp(in_path), &file_cfg);
            ChainConfig use = file_cfg;
            TwistWord w = parse_word(use, word_text);
            DerivedObject out = apply_word(use, w, d);
            report << object_to_string(use, out);
            emit(out_path, report.str());
            std::cout << out.str() << "\n";
        } else if (app.got_subcommand(cmd_sph)) {
            ChainConfig file_cfg(1);
            DerivedObject d = object_from_string(slurp(in_path), &file_cfg);
            auto v = is_spherical(file_cfg, d);
            report << "chaincalc/1 spherical\n";
            report << (v.spherical ? "spherical" : "not-spherical") << "\n";
            if (!v.spherical) report << "reason " << v.reason << "\n";
            report << "certificate E2^{1,q}=0, d2^{0,q} injective (q!=0), dim ker d2^{0,0}=1\n";
            emit(out_path, report.str());
            std::cout << (v.spherical ? "spherical" : ("not spherical: " + v.reason)) << "\n";
            if (!v.spherical) return kExitVerify;
        } else if (app.got_subcommand(cmd_reduce)) {
            ChainConfig file_cfg(1);
            DerivedObject d = object_from_string(slurp(in_path), &file_cfg);
            ReductionTrace tr = reduce_spherical(file_cfg, d);
            std::ostringstream hr;
            write_trace(hr, tr);
            report << hr.str();
            emit(out_path, report.str());
            std::cout << hr.str();
        } else if (app.got_subcommand(cmd_pair)) {
            ChainConfig ca(1), cb(1);
            DerivedObject a = object_from_string(slurp(in_path), &ca);
            DerivedObject b = object_from_string(slurp(in2_path), &cb);
            if (ca.n != cb.n) throw std::invalid_argument("pair: mismatched n");
            PairTrace pt = reduce_pair(ca, a, b);
            std::ostringstream hr;
            write_trace(hr, pt.trace);
            hr << "landing curve " << pt.curve << " degree " << pt.a << " shift " << pt.shift << "\n";
            report << hr.str();
            emit(out_path, report.str());
            std::cout << hr.str();
        } else if (app.got_subcommand(cmd_factor)) {
            TwistWord w = parse_word(cfg, word_text);
            FactorizationResult fr = normalize_autoequivalence(cfg, w);
            std::ostringstream hr;
            hr << "B-word: " << (fr.nf.b_word.empty() ? "(empty)" : word_str(fr.nf.b_word)) << "\n";
            hr << "pic: (";
            for (size_t i = 0; i < fr.nf.pic.degrees.size(); ++i)
                hr << (i ? " " : "") << fr.nf.pic.degrees[i];
            hr << ")\nflip: " << (fr.nf.flip ? "yes" : "no") << "\nshift: " << fr.nf.shift << "\n";
            hr << "certified: " << (fr.certified ? "yes" : "no") << "\n";
            if (!fr.certified) hr << "witness: " << fr.witness << "\n";
            report << hr.str();
            emit(out_path, report.str());
            std::cout << hr.str();
            if (!fr.certified) return kExitVerify;
        } else if (app.got_subcommand(cmd_rel)) {
            bool objects_level = level != "K";
            std::ostringstream hr;
            bool all_pass = true;
            auto emit_line = [&](const std::string& name, const RelationReport& r) {
                hr << name << ": " << (r.pass ? "PASS" : "FAIL") << (r.pass ? "" : " witness " + r.witness)
                   << "\n";
                if (!r.pass) all_pass = false;
            };
            // braid relations on adjacent generators and commutation elsewhere
            auto gens = [&](int i) -> TwistWord {
                if (i >= 1 && i <= cfg.n) return {WordLetter::T(i, -1)};
                return {omega_twist_letter(cfg)};
            };
            for (int i = 0; i <= cfg.n; ++i) {
                int j = (i + 1) % (cfg.n + 1);
                TwistWord lhs, rhs;
                for (const auto& x : {gens(i), gens(j), gens(i)})
                    for (const auto& l : x) lhs.push_back(l);
                for (const auto& x : {gens(j), gens(i), gens(j)})
                    for (const auto& l : x) rhs.push_back(l);
                emit_line("braid(" + std::to_string(i) + "," + std::to_string(j) + ")",
                          check_relation(cfg, lhs, rhs, objects_level));
            }
            for (int i = 0; i <= cfg.n; ++i)
                for (int j = i + 2; j <= cfg.n; ++j) {
                    if ((i == 0 && j == cfg.n)) continue;  // adjacent around the cycle
                    TwistWord lhs, rhs;
                    for (const auto& x : {gens(i), gens(j)})
                        for (const auto& l : x) lhs.push_back(l);
                    for (const auto& x : {gens(j), gens(i)})
                        for (const auto& l : x) rhs.push_back(l);
                    emit_line("commute(" + std::to_string(i) + "," + std::to_string(j) + ")",
                              check_relation(cfg, lhs, rhs, objects_level));
                }
            report << hr.str();
            emit(out_path, report.str());
            std::cout << hr.str();
            if (!all_pass) return kExitVerify;
        } else if (app.got_subcommand(cmd_fuzz)) {
            uint64_t st = seed;
            std::ostringstream hr;
            for (int c = 0; c < count; ++c) {
                int b = 1 + static_cast<int>(mix(st) % cfg.n);
                int a = static_cast<int>(mix(st) % 7) - 3;
                DerivedObject d = sheaf_object(cfg, SubchainLineBundle::single(b, a));
                TwistWord w = random_word(cfg, st, 6);
                DerivedObject moved = apply_word(cfg, w, d);
                if (l_value(moved) > max_l) continue;
                ReductionTrace tr = reduce_spherical(cfg, moved);
                if (l_value(tr.result) != 1) {
                    hr << "case " << c << " FAIL endpoint\n";
                    report << hr.str();
                    emit(out_path, report.str());
                    std::cout << hr.str();
                    return kExitVerify;
                }
                hr << "case " << c << " ok: l " << l_value(moved) << " -> 1 in " << tr.steps.size()
                   << " steps\n";
            }
            report << hr.str();
            emit(out_path, report.str());
            std::cout << hr.str();
        }
        return 0;
    } catch (const EngineError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kExitEngine;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
