#include "chaincalc/format.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace chaincalc {

namespace {

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& m) : std::runtime_error("format: " + m) {}
};

std::string next_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        if (line[a] == '#') continue;
        return line.substr(a);
    }
    return {};
}

}  // namespace

void write_object(std::ostream& os, const ChainConfig& cfg, const DerivedObject& d) {
    os << "chaincalc/1 object\n";
    os << "n " << cfg.n << "\n";
    for (const auto& [p, sums] : d.profile) {
        os << "H " << p << " " << sums.size() << "\n";
        for (const auto& r : sums) {
            os << "S " << r.s << " " << r.t;
            for (int v : r.degs) os << " " << v;
            os << "\n";
        }
    }
    if (d.e_known) {
        for (const auto& [p, blocks] : d.e)
            for (size_t i = 0; i < blocks.size(); ++i)
                for (size_t j = 0; j < blocks[i].size(); ++j) {
                    bool nz = false;
                    for (const auto& v : blocks[i][j])
                        if (!v.is_zero()) nz = true;
                    if (!nz) continue;
                    os << "E " << p << " " << i << " " << j;
                    for (const auto& v : blocks[i][j]) os << " " << v.str();
                    os << "\n";
                }
    } else {
        os << "eunknown\n";
    }
    os << "end\n";
}

DerivedObject read_object(std::istream& is, ChainConfig* cfg_out) {
    std::string header = next_line(is);
    if (header != "chaincalc/1 object") throw FormatError("bad object header");
    std::map<int, std::vector<SubchainLineBundle>> profile;
    std::map<int, EBlocks> e;
    bool e_known = true;
    int n = -1;
    int cur_deg = 0;
    size_t pending = 0;
    std::string line;
    std::vector<std::tuple<int, size_t, size_t, std::vector<Rat>>> eblocks;
    while (!(line = next_line(is)).empty()) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end") break;
        if (tag == "n") {
            ls >> n;
        } else if (tag == "H") {
            ls >> cur_deg >> pending;
            profile[cur_deg];
        } else if (tag == "S") {
            int s, t;
            ls >> s >> t;
            std::vector<int> degs;
            int v;
            while (ls >> v) degs.push_back(v);
            profile[cur_deg].push_back(SubchainLineBundle(s, t, degs));
        } else if (tag == "E") {
            int p;
            size_t i, j;
            ls >> p >> i >> j;
            std::vector<Rat> coords;
            std::string tok;
            while (ls >> tok) coords.push_back(Rat::parse(tok));
            eblocks.push_back({p, i, j, coords});
        } else if (tag == "eunknown") {
            e_known = false;
        } else {
            throw FormatError("unknown object line: " + tag);
        }
    }
    if (n < 1) throw FormatError("object without n");
    ChainConfig cfg(n);
    if (cfg_out) *cfg_out = cfg;
    // shape the e-block matrices
    for (auto it = profile.begin(); it != profile.end(); ++it) {
        auto nx = std::next(it);
        if (nx == profile.end() || nx->first != it->first + 1) continue;
        e[nx->first] = EBlocks(it->second.size(), std::vector<std::vector<Rat>>(nx->second.size()));
    }
    for (auto& [p, i, j, coords] : eblocks) {
        if (!e.count(p)) throw FormatError("e-block without adjacent degrees");
        if (i >= e[p].size() || j >= e[p][i].size()) throw FormatError("e-block out of range");
        e[p][i][j] = coords;
    }
    // read_object keeps the stated summand order; make_object canonicalizes
    return make_object(cfg, std::move(profile), std::move(e), e_known);
}

void write_sheaf(std::ostream& os, const LinkedSheaf& e) {
    os << "chaincalc/1 sheaf\n";
    os << "n " << e.n << "\n";
    for (int i = 0; i < e.n; ++i) {
        os << "curve " << i + 1 << " " << e.degs[i].size();
        for (int v : e.degs[i]) os << " " << v;
        os << "\n";
    }
    for (int i = 0; i + 1 < e.n; ++i) {
        const NodeLink& lk = e.links[i];
        os << "node " << i + 1 << " " << lk.c() << "\n";
        for (size_t r = 0; r < lk.c(); ++r) {
            os << "L";
            for (size_t c = 0; c < lk.L.cols(); ++c) os << " " << lk.L.at(r, c).str();
            os << "\n";
            os << "M";
            for (size_t c = 0; c < lk.M.cols(); ++c) os << " " << lk.M.at(r, c).str();
            os << "\n";
        }
    }
    os << "end\n";
}

LinkedSheaf read_sheaf(std::istream& is) {
    std::string header = next_line(is);
    if (header != "chaincalc/1 sheaf") throw FormatError("bad sheaf header");
    int n = -1;
    std::string line;
    LinkedSheaf e(1);
    bool made = false;
    int cur_node = -1;
    size_t rows_expected = 0, rows_seen = 0;
    while (!(line = next_line(is)).empty()) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "end") break;
        if (tag == "n") {
            ls >> n;
            e = LinkedSheaf(n);
            made = true;
        } else if (tag == "curve") {
            int i;
            size_t r;
            ls >> i >> r;
            std::vector<int> degs;
            int v;
            while (ls >> v) degs.push_back(v);
            if (degs.size() != r) throw FormatError("curve rank mismatch");
            e.degs[i - 1] = degs;
        } else if (tag == "node") {
            int i;
            size_t c;
            ls >> i >> c;
            cur_node = i - 1;
            rows_expected = c;
            rows_seen = 0;
            e.links[cur_node].L = QMat(c, e.degs[cur_node].size());
            e.links[cur_node].M = QMat(c, e.degs[cur_node + 1].size());
        } else if (tag == "L" || tag == "M") {
            if (cur_node < 0 || rows_seen >= rows_expected * 2) throw FormatError("stray link row");
            QMat& m = tag == "L" ? e.links[cur_node].L : e.links[cur_node].M;
            size_t row = rows_seen / 2;
            std::string tok;
            size_t col = 0;
            while (ls >> tok) {
                if (col >= m.cols()) throw FormatError("link row too long");
                m.at(row, col++) = Rat::parse(tok);
            }
            ++rows_seen;
        } else {
            throw FormatError("unknown sheaf line: " + tag);
        }
    }
    if (!made) throw FormatError("sheaf without n");
    // links for untouched nodes keep zero rows with the right column counts
    for (int i = 0; i + 1 < e.n; ++i) {
        if (e.links[i].L.cols() != e.degs[i].size())
            e.links[i].L = QMat(e.links[i].L.rows(), e.degs[i].size());
        if (e.links[i].M.cols() != e.degs[i + 1].size())
            e.links[i].M = QMat(e.links[i].M.rows(), e.degs[i + 1].size());
    }
    e.validate();
    return e;
}

std::string object_to_string(const ChainConfig& cfg, const DerivedObject& d) {
    std::ostringstream os;
    write_object(os, cfg, d);
    return os.str();
}

DerivedObject object_from_string(const std::string& text, ChainConfig* cfg_out) {
    std::istringstream is(text);
    return read_object(is, cfg_out);
}

std::string sheaf_to_string(const LinkedSheaf& e) {
    std::ostringstream os;
    write_sheaf(os, e);
    return os.str();
}

LinkedSheaf sheaf_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_sheaf(is);
}

void write_trace(std::ostream& os, const ReductionTrace& tr) {
    os << "steps " << tr.steps.size() << "\n";
    for (size_t i = 0; i < tr.steps.size(); ++i) {
        const auto& s = tr.steps[i];
        os << i + 1 << ". [" << s.tag << "] l " << s.l_before << " -> " << s.l_after << " via "
           << word_str(s.letters) << "\n";
    }
    os << "word " << word_str(tr.word) << "\n";
    os << "result " << tr.result.str() << "\n";
}

}  // namespace chaincalc
