#include "rboost/model_file.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rboost {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

class Cursor {
public:
    Cursor(std::vector<std::string_view> toks, std::size_t line) : toks_(std::move(toks)), line_(line) {}

    std::string_view word() {
        if (pos_ >= toks_.size()) fail("unexpected end of record");
        return toks_[pos_++];
    }
    void expect(std::string_view w) {
        const auto got = word();
        if (got != w) fail("expected '" + std::string(w) + "', got '" + std::string(got) + "'");
    }
    double real() {
        const auto w = word();
        double v = 0.0;
        const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) fail("bad number '" + std::string(w) + "'");
        return v;
    }
    template <class Int>
    Int integer() {
        const auto w = word();
        Int v{};
        const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) fail("bad integer '" + std::string(w) + "'");
        return v;
    }
    bool done() const { return pos_ == toks_.size(); }
    bool peek(std::string_view w) const { return pos_ < toks_.size() && toks_[pos_] == w; }
    void finish() {
        if (!done()) fail("trailing field '" + std::string(toks_[pos_]) + "'");
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError("model line " + std::to_string(line_) + ": " + what);
    }

private:
    std::vector<std::string_view> toks_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::string term_line(const Term& term) {
    std::ostringstream out;
    out << "term " << fmt(term.coefficient);
    if (const auto* s = std::get_if<DecisionStump>(&term.learner.rule)) {
        out << " stump " << s->feature << ' ' << fmt(s->threshold) << ' ' << fmt(s->left) << ' ' << fmt(s->right)
            << ' ' << (s->degenerate ? 1 : 0);
    } else {
        const auto nodes = std::get<RegressionTree>(term.learner.rule).nodes();
        out << " tree " << nodes.size();
        for (const TreeNode& n : nodes) {
            if (n.is_leaf()) {
                out << " L " << fmt(n.value);
            } else {
                out << " N " << n.feature << ' ' << fmt(n.threshold) << ' ' << n.left << ' ' << n.right;
            }
        }
    }
    if (term.learner.normalization_scale) out << " scale " << fmt(*term.learner.normalization_scale);
    return out.str();
}

Term parse_term(Cursor& c) {
    c.expect("term");
    Term term;
    term.coefficient = c.real();
    const auto kind = c.word();
    if (kind == "stump") {
        DecisionStump s;
        s.feature = c.integer<std::size_t>();
        s.threshold = c.real();
        s.left = c.real();
        s.right = c.real();
        const int deg = c.integer<int>();
        if (deg != 0 && deg != 1) c.fail("degenerate flag must be 0 or 1");
        s.degenerate = deg == 1;
        term.learner.rule = s;
    } else if (kind == "tree") {
        const auto count = c.integer<std::size_t>();
        if (count < 1) c.fail("tree needs at least one node");
        std::vector<TreeNode> nodes(count);
        for (TreeNode& n : nodes) {
            const auto tag = c.word();
            if (tag == "L") {
                n.value = c.real();
            } else if (tag == "N") {
                n.feature = c.integer<int>();
                if (n.feature < 0) c.fail("negative feature index");
                n.threshold = c.real();
                n.left = c.integer<int>();
                n.right = c.integer<int>();
            } else {
                c.fail("unknown node tag '" + std::string(tag) + "'");
            }
        }
        try {
            term.learner.rule = RegressionTree(std::move(nodes));
        } catch (const InvalidInput& e) {
            c.fail(e.what());
        }
    } else {
        c.fail("unknown learner kind '" + std::string(kind) + "'");
    }
    if (c.peek("scale")) {
        c.word();
        term.learner.normalization_scale = c.real();
    }
    c.finish();
    return term;
}

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    while (!bytes.empty()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), chunk);
        bytes.remove_prefix(chunk);
    }
    return static_cast<std::uint32_t>(crc);
}

std::string_view to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

Task parse_task(std::string_view name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::binary_classification;
    throw InvalidInput("unknown task '" + std::string(name) + "' (expected regression or classification)");
}

std::string model_to_string(const ModelFile& file) {
    const auto terms = materialize(file.model);
    std::string body;
    auto line = [&](const std::string& s) {
        body += s;
        body += '\n';
    };
    line("rboost-model " + std::to_string(kModelFormatVersion));
    line("loss " + std::string(to_string(file.loss)));
    line("task " + std::string(to_string(file.task)));
    line("features " + std::to_string(file.model.feature_count()));
    line("seed " + std::to_string(file.seed));
    line("intercept " + fmt(file.model.resolved_intercept()));
    line("terms " + std::to_string(terms.size()));
    for (const Term& t : terms) line(term_line(t));
    char footer[32];
    std::snprintf(footer, sizeof footer, "crc32 %08x", crc32_of(body));
    line(footer);
    return body;
}

void write_model(std::ostream& out, const ModelFile& file) { out << model_to_string(file); }

ModelFile model_from_string(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string l(text.substr(start, end - start));
        if (!l.empty() && l.back() == '\r') l.pop_back();
        lines.push_back(std::move(l));
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw FormatError("model: empty file");

    std::size_t at = 0;
    auto next = [&](std::string_view keyword) {
        if (at >= lines.size()) throw FormatError("model: missing '" + std::string(keyword) + "' record");
        Cursor c(tokens(lines[at]), at + 1);
        ++at;
        c.expect(keyword);
        return c;
    };

    auto header = next("rboost-model");
    const int version = header.integer<int>();
    header.finish();
    if (version != kModelFormatVersion) {
        throw FormatError("model: unsupported format version " + std::to_string(version));
    }

    ModelFile file;
    auto loss = next("loss");
    const auto loss_name = loss.word();
    loss.finish();
    auto task = next("task");
    const auto task_name = task.word();
    task.finish();
    try {
        file.loss = parse_loss(loss_name);
        file.task = parse_task(task_name);
    } catch (const InvalidInput& e) {
        throw FormatError(std::string("model: ") + e.what());
    }
    auto feat = next("features");
    const auto features = feat.integer<std::size_t>();
    feat.finish();
    auto seed = next("seed");
    file.seed = seed.integer<std::uint64_t>();
    seed.finish();
    auto icpt = next("intercept");
    const double intercept = icpt.real();
    icpt.finish();
    auto count = next("terms");
    const auto n_terms = count.integer<std::size_t>();
    count.finish();

    std::vector<Term> terms;
    for (std::size_t j = 0; j < n_terms; ++j) {
        if (at >= lines.size()) throw FormatError("model: expected " + std::to_string(n_terms) + " terms");
        Cursor c(tokens(lines[at]), at + 1);
        ++at;
        terms.push_back(parse_term(c));
        if (terms.back().learner.required_features() > features) {
            c.fail("term uses a feature beyond the declared count");
        }
    }

    std::string body;
    for (std::size_t i = 0; i < at; ++i) body += lines[i] + '\n';
    auto footer = next("crc32");
    const auto hex = footer.word();
    footer.finish();
    if (at != lines.size()) throw FormatError("model: content after checksum footer");
    std::uint32_t stored = 0;
    const auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), stored, 16);
    if (ec != std::errc() || p != hex.data() + hex.size() || hex.size() != 8) {
        throw FormatError("model: malformed checksum '" + std::string(hex) + "'");
    }
    if (stored != crc32_of(body)) throw ChecksumError("model: checksum mismatch");

    file.model = from_terms(features, intercept, std::move(terms));
    return file;
}

ModelFile read_model(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_string(buf.str());
}

void save_model(const std::string& path, const ModelFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_model(out, file);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_model(in);
}

}  // namespace rboost
