#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamstream/alphabet.hpp"
#include "hamstream/corpus.hpp"
#include "hamstream/oracle.hpp"
#include "hamstream/protocol.hpp"
#include "hamstream/pstable.hpp"
#include "hamstream/streaming.hpp"

using namespace hamstream;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << data;
}

Text parse_text(const std::string& bytes, const std::string& format, std::size_t bit_length) {
    Text t;
    if (format == "ascii01") {
        std::size_t end = bytes.size();
        while (end > 0 && (bytes[end - 1] == '\n' || bytes[end - 1] == '\r' || bytes[end - 1] == ' ')) --end;
        for (std::size_t i = 0; i < end; ++i) {
            if (bytes[i] != '0' && bytes[i] != '1')
                throw UsageError("binary input must contain only the bytes 0x30 and 0x31");
            t.push_back(bytes[i] == '1');
        }
    } else if (format == "bits") {
        const std::size_t avail = bytes.size() * 8;
        const std::size_t len = bit_length ? bit_length : avail;
        if (len > avail) throw UsageError("packed input is shorter than --length");
        for (std::size_t i = 0; i < len; ++i)
            t.push_back((static_cast<unsigned char>(bytes[i / 8]) >> (7 - i % 8)) & 1);
    } else if (format == "bytes") {
        for (unsigned char c : bytes) t.push_back(c);
    } else if (format == "ints") {
        std::istringstream in(bytes);
        std::string tok;
        while (in >> tok) {
            std::size_t used = 0;
            unsigned long v = 0;
            try {
                v = std::stoul(tok, &used);
            } catch (const std::exception&) {
                throw UsageError("malformed integer symbol '" + tok + "'");
            }
            if (used != tok.size() || v > 0xffffffffUL) throw UsageError("malformed integer symbol '" + tok + "'");
            t.push_back(static_cast<Symbol>(v));
        }
    } else {
        throw UsageError("unknown input format " + format);
    }
    return t;
}

std::string format_text(TextView t, const std::string& format) {
    std::string out;
    if (format == "ascii01") {
        for (Symbol s : t) {
            if (s > 1) throw UsageError("ascii01 output needs a binary alphabet");
            out.push_back(s ? '1' : '0');
        }
        out.push_back('\n');
    } else if (format == "bits") {
        out.assign((t.size() + 7) / 8, '\0');
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] > 1) throw UsageError("bits output needs a binary alphabet");
            if (t[i]) out[i / 8] = static_cast<char>(static_cast<unsigned char>(out[i / 8]) | (0x80u >> (i % 8)));
        }
    } else if (format == "bytes") {
        for (Symbol s : t) {
            if (s > 255) throw UsageError("bytes output needs sigma <= 256");
            out.push_back(static_cast<char>(s));
        }
    } else if (format == "ints") {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) out.push_back(' ');
            out += std::to_string(t[i]);
        }
        out.push_back('\n');
    } else {
        throw UsageError("unknown output format " + format);
    }
    return out;
}

Seed resolve_seed(const std::string& flag) {
    std::string s = flag;
    if (s.empty()) {
        const char* env = std::getenv("HAMSTREAM_SEED");
        if (env) s = env;
    }
    if (s.empty()) throw UsageError("a seed is required: pass --seed or set HAMSTREAM_SEED");
    if (s.size() == 64) return Seed::from_hex(s);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used, 0);
    } catch (const std::exception&) {
        throw UsageError("seed must be 64 hex characters or an integer");
    }
    if (used != s.size()) throw UsageError("seed must be 64 hex characters or an integer");
    return Seed::from_u64(v);
}

void check_eps(double eps, bool allow_large) {
    const double hi = allow_large ? 1.0 : 0.5;
    const bool ok = allow_large ? (eps > 0.0 && eps <= hi) : (eps > 0.0 && eps < hi);
    if (!ok)
        throw UsageError(allow_large ? "eps must lie in (0, 1]" : "eps must lie in (0, 0.5); pass --allow-large-eps to override");
}

std::string num(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double rel_error(double est, double h) { return std::fabs(est - h) / std::max(h, 1.0); }

bool within(double est, double h, double eps) {
    if (h == 0.0) return est == 0.0;
    return est >= h / (1.0 + eps) && est <= (1.0 + eps) * h;
}

PrefixDistanceTask::Method parse_method(const std::string& m) {
    if (m == "fft") return PrefixDistanceTask::Method::fft;
    if (m == "naive") return PrefixDistanceTask::Method::naive;
    throw UsageError("unknown method " + m);
}

double bits_model(double n, double eps) { return std::pow(eps, -3) * std::sqrt(n) * std::pow(std::log2(n), 2); }
double steps_model(double n, double eps) { return std::pow(eps, -2) * std::log2(n); }

// ---- stream ----

struct StreamOpts {
    std::string pattern, text, out, report, format = "ascii01", method = "fft", seed;
    double eps = 0.25, discard = 0.0;
    std::size_t instances = 9, anchor_k = 0, block_len = 0, length = 0;
    bool oracle = false, allow_large = false;
};

int cmd_stream(const StreamOpts& o) {
    check_eps(o.eps, o.allow_large);
    const Seed seed = resolve_seed(o.seed);
    const Text p = parse_text(read_input(o.pattern), o.format, o.length);
    const Text t = parse_text(read_input(o.text), o.format, o.length);
    EngineConfig cfg;
    cfg.eps = o.eps;
    cfg.instances = o.instances;
    cfg.anchor_k = o.anchor_k;
    cfg.method = parse_method(o.method);
    cfg.discard_factor = o.discard;
    cfg.block_len = o.block_len;
    StreamingEngine eng(p, cfg, seed);
    std::vector<StreamOutput> outs;
    for (Symbol s : t)
        if (auto r = eng.push(s)) outs.push_back(*r);

    std::ostringstream csv;
    csv << "# hamstream-stream v1 n=" << p.size() << " eps=" << num(o.eps) << " instances=" << o.instances
        << " B=" << eng.block_len() << " seed=" << seed.hex() << "\n";
    csv << "position,estimate,hp,hm,hs";
    std::vector<std::size_t> truth;
    if (o.oracle) {
        csv << ",oracle,rel_error";
        truth = oracle::sliding_hamming(p, t);
    }
    csv << "\n";
    for (const auto& r : outs) {
        csv << r.position << ',' << num(r.estimate) << ',' << num(r.parts.hp) << ',' << num(r.parts.hm) << ','
            << num(r.parts.hs);
        if (o.oracle) {
            const double h = static_cast<double>(truth[r.position]);
            csv << ',' << truth[r.position] << ',' << num(rel_error(r.estimate, h));
        }
        csv << "\n";
    }
    write_output(o.out, csv.str());

    if (!o.report.empty()) {
        const SpaceReport sr = eng.space_report();
        json j;
        j["n"] = p.size();
        j["eps"] = o.eps;
        j["block_len"] = eng.block_len();
        j["instances"] = eng.instances();
        j["symbols"] = t.size();
        j["outputs"] = outs.size();
        j["resident_bits"] = sr.total();
        j["pattern_bits"] = sr.pattern_bits;
        j["state_bits"] = sr.state_bits;
        j["max_steps_per_symbol"] = eng.max_steps_per_symbol();
        std::vector<std::size_t> maxes, totals;
        for (std::size_t i = 0; i < eng.instances(); ++i) {
            maxes.push_back(eng.state(i).steps().max);
            totals.push_back(eng.state(i).steps().total);
        }
        j["instance_max_steps"] = maxes;
        j["instance_total_steps"] = totals;
        j["build_budget_per_symbol"] = eng.state(0).build_budget();
        j["deadline_checks"] = eng.state(0).deadline_checks();
        j["bits_constant"] = static_cast<double>(sr.total()) / bits_model(static_cast<double>(p.size()), o.eps);
        j["steps_constant"] =
            static_cast<double>(eng.max_steps_per_symbol()) / steps_model(static_cast<double>(p.size()), o.eps);
        write_output(o.report, j.dump(2) + "\n");
    }
    return 0;
}

// ---- stream-general ----

struct GeneralOpts {
    std::string pattern, text, out, format = "bytes", reduction = "karloff", method = "fft", seed;
    double eps = 0.25, c_k = 1.0;
    std::uint32_t sigma = 0;
    std::size_t maps = 0, inner = 1;
    bool oracle = false, allow_large = false;
};

int cmd_stream_general(const GeneralOpts& o) {
    check_eps(o.eps, o.allow_large);
    const Seed seed = resolve_seed(o.seed);
    const Text p = parse_text(read_input(o.pattern), o.format, 0);
    const Text t = parse_text(read_input(o.text), o.format, 0);
    GeneralConfig cfg;
    cfg.eps = o.eps;
    cfg.sigma = o.sigma;
    cfg.maps = o.maps;
    cfg.c_k = o.c_k;
    cfg.inner_instances = o.inner;
    cfg.method = parse_method(o.method);
    if (o.reduction == "karloff")
        cfg.reduction = Reduction::karloff;
    else if (o.reduction == "onehot")
        cfg.reduction = Reduction::onehot;
    else
        throw UsageError("unknown reduction " + o.reduction);
    const auto outs = stream_general(p, t, cfg, seed);
    std::ostringstream csv;
    csv << "# hamstream-stream-general v1 n=" << p.size() << " eps=" << num(o.eps) << " reduction=" << o.reduction
        << " maps=" << (o.maps ? o.maps : KarloffFamily::count_for(o.eps, p.size(), o.c_k)) << " seed=" << seed.hex()
        << "\n";
    csv << "position,estimate";
    std::vector<std::size_t> truth;
    if (o.oracle) {
        csv << ",oracle,rel_error";
        truth = oracle::sliding_hamming(p, t);
    }
    csv << "\n";
    for (const auto& r : outs) {
        csv << r.position << ',' << num(r.estimate);
        if (o.oracle) csv << ',' << truth[r.position] << ',' << num(rel_error(r.estimate, static_cast<double>(truth[r.position])));
        csv << "\n";
    }
    write_output(o.out, csv.str());
    return 0;
}

// ---- protocol ----

struct ProtocolOpts {
    int problem = 1;
    std::vector<std::size_t> ns{64};
    std::vector<double> epss{0.25};
    std::size_t seeds = 1, instances = 9, test_k = 0;
    std::uint32_t sigma = 2;
    double c_m = 64.0;
    std::string pattern, text, format = "ascii01", seed, out, transcript, estimates;
    bool allow_large = false;
};

// Random pattern; text with a near copy early in the first half and an exact copy as the second half.
std::pair<Text, Text> protocol_corpus(std::size_t n, std::uint32_t sigma, const Seed& s) {
    Text p = random_text(n, sigma, s, 0);
    const auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    Text t = planted_text(p, 2 * n, sigma, {{n / 8, root}, {n / 2, n / 8}, {n, 0}}, s, 1);
    return {std::move(p), std::move(t)};
}

int cmd_protocol(const ProtocolOpts& o) {
    if (o.problem != 1 && o.problem != 2) throw UsageError("--problem must be 1 or 2");
    const Seed base = resolve_seed(o.seed);
    std::ostringstream csv, jsonl, rows;
    csv << "# hamstream-protocol v1 problem=" << o.problem << " seed=" << base.hex() << "\n";
    rows << "# hamstream-protocol-estimates v1 problem=" << o.problem << " seed=" << base.hex() << "\n";
    rows << "n,eps,seed_index,alignment,estimate,oracle,rel_error\n";
    csv << "problem,n,eps,seed_index,total_bits,alignments,within,frac_within,max_rel_error,fit_constant\n";
    struct Cell {
        std::size_t n;
        double eps;
        std::size_t index;
        Text p, t;
        Seed seed;
    };
    std::vector<Cell> cells;
    if (!o.pattern.empty() || !o.text.empty()) {
        if (o.pattern.empty() || o.text.empty()) throw UsageError("--pattern and --text go together");
        Cell c{0, o.epss.front(), 0, parse_text(read_input(o.pattern), o.format, 0),
               parse_text(read_input(o.text), o.format, 0), base};
        c.n = c.p.size();
        cells.push_back(std::move(c));
    } else {
        for (std::size_t n : o.ns)
            for (double eps : o.epss)
                for (std::size_t s = 0; s < o.seeds; ++s) {
                    const Seed cs = base.derive(3, s);
                    auto [p, t] = protocol_corpus(n, o.sigma, cs);
                    cells.push_back({n, eps, s, std::move(p), std::move(t), cs});
                }
    }
    for (const Cell& c : cells) {
        check_eps(c.eps, o.allow_large);
        if (c.t.size() != 2 * c.n) throw UsageError("text must be twice as long as the pattern");
        ProtocolConfig cfg;
        cfg.eps = c.eps;
        cfg.instances = o.instances;
        cfg.c_m = o.c_m;
        cfg.test_k = o.test_k;
        std::vector<double> est;
        Transcript tr;
        if (o.problem == 1) {
            auto r = run_problem1(c.p, c.t, cfg, c.seed);
            est = std::move(r.estimates);
            tr = std::move(r.transcript);
        } else {
            auto r = run_problem2(c.p, c.t, cfg, c.seed);
            est = std::move(r.estimates);
            tr = std::move(r.transcript);
        }
        const auto truth = oracle::sliding_hamming(c.p, c.t);
        std::size_t ok = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i) {
            const double h = static_cast<double>(truth[i]);
            ok += within(est[i], h, c.eps);
            worst = std::max(worst, rel_error(est[i], h));
            if (!o.estimates.empty())
                rows << c.n << ',' << num(c.eps) << ',' << c.index << ',' << i << ',' << num(est[i]) << ',' << truth[i]
                     << ',' << num(rel_error(est[i], h)) << "\n";
        }
        const double n = static_cast<double>(c.n);
        const double model = o.problem == 1 ? std::pow(c.eps, -4) * std::pow(std::log2(n), 2)
                                            : std::pow(c.eps, -2) * std::sqrt(n) * std::log2(n);
        csv << o.problem << ',' << c.n << ',' << num(c.eps) << ',' << c.index << ',' << tr.total_bits() << ','
            << est.size() << ',' << ok << ',' << num(static_cast<double>(ok) / static_cast<double>(est.size())) << ','
            << num(worst) << ',' << num(static_cast<double>(tr.total_bits()) / model) << "\n";
        if (!o.transcript.empty()) {
            json head = {{"run", {{"problem", o.problem}, {"n", c.n}, {"eps", c.eps}, {"seed_index", c.index}}}};
            jsonl << head.dump() << "\n" << tr.to_jsonl();
        }
    }
    write_output(o.out, csv.str());
    if (!o.transcript.empty()) write_output(o.transcript, jsonl.str());
    if (!o.estimates.empty()) write_output(o.estimates, rows.str());
    return 0;
}

// ---- calibrate ----

struct CalibrateOpts {
    double eps = 0.0, p = 0.0, c_m = 64.0;
    std::uint32_t sigma = 2;
    std::size_t m = 0, trials = CalibrationTable::kTrials;
    std::string seed, out;
};

int cmd_calibrate(const CalibrateOpts& o) {
    double p = o.p;
    std::size_t m = o.m;
    if (o.eps > 0.0) {
        if (p == 0.0) p = stability_for(o.eps, o.sigma);
        if (m == 0) m = pstable_rows(o.eps, o.c_m);
    }
    if (!(p > 0.0 && p <= 2.0) || m == 0) throw UsageError("pass --eps, or both --p and --m");
    const Seed seed = o.seed.empty() ? CalibrationTable::calibration_seed() : resolve_seed(o.seed);
    const double scale = calibrate_scale(p, m, o.trials, seed);
    json j = {{"p", p}, {"m", m}, {"trials", o.trials}, {"seed", seed.hex()}, {"scale", scale}};
    write_output(o.out, j.dump(2) + "\n");
    return 0;
}

// ---- gen ----

struct GenOpts {
    std::string kind = "random", out, format = "ascii01", seed, pattern, pattern_out;
    std::size_t n = 64, m = 0, period = 8, noise = 0, max_run = 8;
    std::uint32_t sigma = 2;
    std::vector<std::string> plants;
};

int cmd_gen(const GenOpts& o) {
    const Seed seed = resolve_seed(o.seed);
    Text t;
    if (o.kind == "random") {
        t = random_text(o.n, o.sigma, seed);
    } else if (o.kind == "periodic") {
        t = periodic_text(o.n, o.period, o.noise, o.sigma, seed);
    } else if (o.kind == "runs") {
        t = runs_text(o.n, o.max_run, o.sigma, seed);
    } else if (o.kind == "planted") {
        Text p;
        if (!o.pattern.empty()) {
            p = parse_text(read_input(o.pattern), o.format, 0);
        } else {
            if (o.m == 0) throw UsageError("planted needs --pattern FILE or --m LEN");
            p = random_text(o.m, o.sigma, seed, 4);
            if (!o.pattern_out.empty()) write_output(o.pattern_out, format_text(p, o.format));
        }
        std::vector<Plant> plants;
        for (const auto& spec : o.plants) {
            const auto colon = spec.find(':');
            if (colon == std::string::npos) throw UsageError("plants are given as POSITION:DISTANCE");
            try {
                plants.push_back({std::stoul(spec.substr(0, colon)), std::stoul(spec.substr(colon + 1))});
            } catch (const std::exception&) {
                throw UsageError("malformed plant " + spec);
            }
        }
        t = planted_text(p, o.n, o.sigma, plants, seed);
    } else {
        throw UsageError("unknown generator " + o.kind);
    }
    write_output(o.out, format_text(t, o.format));
    return 0;
}

// ---- bench ----

struct BenchOpts {
    std::vector<std::size_t> ns{64, 256, 1024};
    std::vector<double> epss{0.25};
    std::size_t seeds = 3, instances = 9, text_factor = 4;
    std::string seed, out, method = "fft";
    bool timing = false, allow_large = false;
};

int cmd_bench(const BenchOpts& o) {
    for (double eps : o.epss) check_eps(eps, o.allow_large);
    const Seed base = resolve_seed(o.seed);
    std::ostringstream csv;
    csv << "# hamstream-bench v1 seed=" << base.hex() << "\n";
    csv << "n,eps,seed_index,block_len,pattern_bits,state_bits,resident_bits,max_steps,mean_steps,outputs,within,"
           "frac_within,bits_constant,steps_constant";
    if (o.timing) csv << ",seconds";
    csv << "\n";
    for (std::size_t n : o.ns)
        for (double eps : o.epss)
            for (std::size_t s = 0; s < o.seeds; ++s) {
                const Seed cs = base.derive(4, s);
                const Text p = random_text(n, 2, cs, 0);
                const Text t = random_text(o.text_factor * n, 2, cs, 1);
                EngineConfig cfg;
                cfg.eps = eps;
                cfg.instances = o.instances;
                cfg.method = parse_method(o.method);
                const auto start = std::chrono::steady_clock::now();
                StreamingEngine eng(p, cfg, cs);
                std::size_t outputs = 0, ok = 0;
                const auto truth = oracle::sliding_hamming(p, t);
                std::size_t peak_bits = 0;
                SpaceReport peak;
                for (Symbol c : t) {
                    if (auto r = eng.push(c)) {
                        ++outputs;
                        ok += within(r->estimate, static_cast<double>(truth[r->position]), eps);
                    }
                    const SpaceReport sr = eng.space_report();
                    if (sr.total() > peak_bits) {
                        peak_bits = sr.total();
                        peak = sr;
                    }
                }
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::size_t pb = 0, sb = 0, total_steps = 0, symbols = 0;
                for (auto b : peak.pattern_bits) pb += b;
                for (auto b : peak.state_bits) sb += b;
                for (std::size_t i = 0; i < eng.instances(); ++i) {
                    total_steps += eng.state(i).steps().total;
                    symbols += eng.state(i).steps().symbols;
                }
                const double dn = static_cast<double>(n);
                csv << n << ',' << num(eps) << ',' << s << ',' << eng.block_len() << ',' << pb << ',' << sb << ','
                    << peak_bits << ',' << eng.max_steps_per_symbol() << ','
                    << num(static_cast<double>(total_steps) / static_cast<double>(symbols)) << ',' << outputs << ','
                    << ok << ',' << num(static_cast<double>(ok) / static_cast<double>(outputs)) << ','
                    << num(static_cast<double>(peak_bits) / bits_model(dn, eps)) << ','
                    << num(static_cast<double>(eng.max_steps_per_symbol()) / steps_model(dn, eps));
                if (o.timing) csv << ',' << num(secs);
                csv << "\n";
            }
    write_output(o.out, csv.str());
    return 0;
}

// ---- report ----

struct ReportOpts {
    std::string in, out;
    double eps = 0.25;
};

int cmd_report(const ReportOpts& o) {
    std::istringstream in(read_input(o.in));
    std::string line;
    std::vector<std::string> header;
    std::size_t rows = 0, ok = 0;
    double worst = 0.0, sum = 0.0;
    int est_col = -1, truth_col = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (header[i] == "estimate") est_col = static_cast<int>(i);
                if (header[i] == "oracle") truth_col = static_cast<int>(i);
            }
            if (est_col < 0 || truth_col < 0) throw UsageError("report needs estimate and oracle columns (run with --oracle)");
            continue;
        }
        if (cells.size() != header.size()) throw UsageError("ragged CSV row: " + line);
        const double est = std::stod(cells[static_cast<std::size_t>(est_col)]);
        const double h = std::stod(cells[static_cast<std::size_t>(truth_col)]);
        ++rows;
        ok += within(est, h, o.eps);
        const double e = rel_error(est, h);
        worst = std::max(worst, e);
        sum += e;
    }
    if (rows == 0) throw UsageError("no data rows in " + o.in);
    std::ostringstream csv;
    csv << "# hamstream-report v1 eps=" << num(o.eps) << "\n";
    csv << "rows,within,frac_within,max_rel_error,mean_rel_error\n";
    csv << rows << ',' << ok << ',' << num(static_cast<double>(ok) / static_cast<double>(rows)) << ',' << num(worst)
        << ',' << num(sum / static_cast<double>(rows)) << "\n";
    write_output(o.out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate pattern matching under Hamming distance: streaming, protocols, tooling"};
    app.require_subcommand(1);

    StreamOpts so;
    auto* st = app.add_subcommand("stream", "Stream a binary text against a pattern");
    st->add_option("--pattern", so.pattern, "Pattern file")->required();
    st->add_option("--text", so.text, "Text file or - for stdin")->required();
    st->add_option("--eps", so.eps, "Approximation parameter");
    st->add_option("--seed", so.seed, "64 hex characters or an integer");
    st->add_option("--instances", so.instances, "Independent instances for median amplification");
    st->add_option("--out", so.out, "Output CSV (default stdout)");
    st->add_flag("--oracle", so.oracle, "Add exact distances and relative errors");
    st->add_option("--report", so.report, "Write space and step instrumentation as JSON");
    st->add_option("--format", so.format, "ascii01 or bits");
    st->add_option("--length", so.length, "Bit count for packed input");
    st->add_option("--method", so.method, "Block distances: fft or naive");
    st->add_option("--anchor-k", so.anchor_k, "Anchor base override (testing)");
    st->add_option("--block-len", so.block_len, "Block length override (testing)");
    st->add_option("--discard-factor", so.discard, "Skip prefix and suffix parts above factor * 2B/eps");
    st->add_flag("--allow-large-eps", so.allow_large, "Accept eps in [0.5, 1]");

    GeneralOpts go;
    auto* sg = app.add_subcommand("stream-general", "Stream a general-alphabet text through binary reductions");
    sg->add_option("--pattern", go.pattern)->required();
    sg->add_option("--text", go.text)->required();
    sg->add_option("--eps", go.eps);
    sg->add_option("--seed", go.seed);
    sg->add_option("--sigma", go.sigma, "Alphabet size (default: inferred)");
    sg->add_option("--maps", go.maps, "Number of random maps (default from eps and n)");
    sg->add_option("--c-k", go.c_k, "Constant in the default map count");
    sg->add_option("--inner-instances", go.inner, "Instances per binary engine");
    sg->add_option("--reduction", go.reduction, "karloff or onehot");
    sg->add_option("--format", go.format, "bytes or ints");
    sg->add_option("--method", go.method);
    sg->add_option("--out", go.out);
    sg->add_flag("--oracle", go.oracle);
    sg->add_flag("--allow-large-eps", go.allow_large, "Accept eps in [0.5, 1]");

    ProtocolOpts po;
    auto* pr = app.add_subcommand("protocol", "Simulate the one-way protocols and account bits");
    pr->add_option("--problem", po.problem)->required();
    pr->add_option("--n", po.ns, "Pattern lengths for the sweep")->delimiter(',');
    pr->add_option("--eps", po.epss, "Approximation parameters")->delimiter(',');
    pr->add_option("--seeds", po.seeds, "Seeds per cell");
    pr->add_option("--seed", po.seed);
    pr->add_option("--sigma", po.sigma, "Alphabet of the generated corpus");
    pr->add_option("--instances", po.instances);
    pr->add_option("--c-m", po.c_m, "Rows constant of the p-stable sketches");
    pr->add_option("--test-k", po.test_k, "Anchor base override for problem 1");
    pr->add_option("--pattern", po.pattern, "Pattern file instead of the generated corpus");
    pr->add_option("--text", po.text, "Text file of length 2n");
    pr->add_option("--format", po.format);
    pr->add_option("--transcript", po.transcript, "Transcript JSON lines");
    pr->add_option("--out", po.out, "Summary CSV");
    pr->add_option("--estimates", po.estimates, "Per-alignment estimates CSV");
    pr->add_flag("--allow-large-eps", po.allow_large, "Accept eps in [0.5, 1]");

    CalibrateOpts co;
    auto* ca = app.add_subcommand("calibrate", "Measure the median scale of |p-stable| sketch rows");
    ca->add_option("--eps", co.eps);
    ca->add_option("--sigma", co.sigma);
    ca->add_option("--p", co.p);
    ca->add_option("--m", co.m);
    ca->add_option("--c-m", co.c_m);
    ca->add_option("--trials", co.trials);
    ca->add_option("--seed", co.seed, "Defaults to the fixed calibration seed");
    ca->add_option("--out", co.out);

    GenOpts ge;
    auto* gn = app.add_subcommand("gen", "Generate synthetic corpora");
    gn->add_option("--kind", ge.kind, "random, planted, periodic or runs");
    gn->add_option("--n", ge.n, "Output length");
    gn->add_option("--sigma", ge.sigma);
    gn->add_option("--seed", ge.seed);
    gn->add_option("--out", ge.out);
    gn->add_option("--format", ge.format, "ascii01, bits, bytes or ints");
    gn->add_option("--period", ge.period);
    gn->add_option("--noise", ge.noise, "Mismatch budget of the self-overlap at the period");
    gn->add_option("--max-run", ge.max_run);
    gn->add_option("--pattern", ge.pattern, "Pattern to plant");
    gn->add_option("--m", ge.m, "Length of a generated pattern to plant");
    gn->add_option("--pattern-out", ge.pattern_out, "Where to write the generated pattern");
    gn->add_option("--plant", ge.plants, "POSITION:DISTANCE, repeatable");

    BenchOpts bo;
    auto* bn = app.add_subcommand("bench", "Sweep the streaming engine and record space and steps");
    bn->add_option("--n", bo.ns)->delimiter(',');
    bn->add_option("--eps", bo.epss)->delimiter(',');
    bn->add_option("--seeds", bo.seeds);
    bn->add_option("--seed", bo.seed);
    bn->add_option("--instances", bo.instances);
    bn->add_option("--text-factor", bo.text_factor);
    bn->add_option("--method", bo.method);
    bn->add_option("--out", bo.out);
    bn->add_flag("--timing", bo.timing, "Add wall-clock seconds (not reproducible)");
    bn->add_flag("--allow-large-eps", bo.allow_large, "Accept eps in [0.5, 1]");

    ReportOpts ro;
    auto* rp = app.add_subcommand("report", "Summarize an estimates CSV that carries oracle columns");
    rp->add_option("--in", ro.in)->required();
    rp->add_option("--eps", ro.eps);
    rp->add_option("--out", ro.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (st->parsed()) return cmd_stream(so);
        if (sg->parsed()) return cmd_stream_general(go);
        if (pr->parsed()) return cmd_protocol(po);
        if (ca->parsed()) return cmd_calibrate(co);
        if (gn->parsed()) return cmd_gen(ge);
        if (bn->parsed()) return cmd_bench(bo);
        if (rp->parsed()) return cmd_report(ro);
    } catch (const UsageError& e) {
        std::cerr << "hamstream: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hamstream: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
