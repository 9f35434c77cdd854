#include "kmcoh/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace kmcoh;

namespace {

constexpr int kOk = 0, kMismatch = 1, kConfig = 2;

int do_verify(const SuiteConfig& base, const std::string& level, const std::string& weight, const std::string& format) {
    SuiteConfig cfg = base;
    if (!level.empty()) cfg.level = parse_level(level);
    if (!weight.empty()) cfg.weight = parse_weight(weight);
    ReportFormat f = parse_report_format(format);
    validate(cfg);
    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw ConfigError("cannot write report to " + cfg.output);
    }
    SuiteReport r = run_suite(cfg);
    print_table(r, std::cout);
    if (file.is_open()) {
        emit_report(r.records, f, file);
        if (!file) throw std::runtime_error("failed writing " + cfg.output);
    }
    return r.passed() ? kOk : kMismatch;
}

int do_canonicalize(const std::string& algebra, int precision, const std::string& input) {
    auto L = build_simple_lie_algebra(algebra);
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot read " + input);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed oper JSON: ") + e.what());
    }
    OperRep op;
    try {
        op = oper_from_json(L, j);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid oper: ") + e.what());
    }
    if (op.precision != precision) throw ConfigError("input precision differs from --precision");
    nlohmann::ordered_json out;
    if (op.singularity == Singularity::RS) {
        out["residue_charpoly"] = nlohmann::json::array();
        for (auto& c : rs_residue(L, op)) out["residue_charpoly"].push_back(c.get_str());
    } else {
        auto [can, gauge] = canonical_form(L, op);
        out["canonical"] = to_json(L, can);
        out["gauge"] = to_json(L, gauge);
    }
    std::cout << out.dump(1) << "\n";
    return kOk;
}

int do_dims(const std::string& label, const std::string& algebra, int max_energy, int max_degree) {
    if (max_energy < 0 || max_degree < 0) throw ConfigError("cutoffs must be non-negative");
    SeriesLabel s;
    try {
        s = parse_series_label(label);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    auto L = build_simple_lie_algebra(algebra);
    auto h = hilbert_series(s, L, max_energy, max_degree);
    std::cout << "series " << label << " on " << algebra << " (rows p, columns energy 0.." << max_energy << ")\n";
    for (int p = 0; p <= max_degree; ++p) {
        std::cout << "p=" << p << ":";
        for (int E = 0; E <= max_energy; ++E) std::cout << " " << h.coeff[p][E];
        std::cout << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-infinite cohomology of affine Kac-Moody modules, verified against oper-side Hilbert series"};
    app.require_subcommand(1);

    SuiteConfig cfg;
    std::string level, weight, format = "json";
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", cfg.suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    verify->add_option("--algebra", cfg.algebra, "sl2 or sl3")->required();
    verify->add_option("--max-energy", cfg.max_energy, "energy cutoff")->required();
    verify->add_option("--max-degree", cfg.max_degree, "largest cohomological degree")->required();
    verify->add_option("--level", level, "critical or generic:H");
    verify->add_option("--weight", weight, "integral Verma weight, comma separated");
    verify->add_option("--precision", cfg.precision, "t-adic precision for oper suites");
    verify->add_option("--report", cfg.output, "report file");
    verify->add_option("--format", format, "json or tsv");

    std::string algebra = "sl2", input;
    int precision = 4;
    auto* oper = app.add_subcommand("oper", "oper utilities");
    oper->require_subcommand(1);
    auto* canon = oper->add_subcommand("canonicalize", "reduce an oper to the canonical slice");
    canon->add_option("--algebra", algebra, "sl2 or sl3")->required();
    canon->add_option("--precision", precision, "precision K")->required();
    canon->add_option("--input", input, "oper JSON file")->required();

    std::string label;
    int dims_energy = 0, dims_degree = 2;
    auto* dims = app.add_subcommand("dims", "print an oracle Hilbert series");
    dims->add_option("--series", label, "FunC, OmegaC, FunCRS, OmegaCRS, FunOp, OmegaOp, OmegaOpRS")->required();
    dims->add_option("--algebra", algebra, "sl2 or sl3")->required();
    dims->add_option("--max-energy", dims_energy, "energy cutoff")->required();
    dims->add_option("--max-degree", dims_degree, "largest degree in the s variable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*verify) return do_verify(cfg, level, weight, format);
        if (*canon) return do_canonicalize(algebra, precision, input);
        if (*dims) return do_dims(label, algebra, dims_energy, dims_degree);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const UnknownAlgebra& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const PrecisionMismatch& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMismatch;
    }
    return kConfig;
}
