#include "sdcc/cli.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "sdcc/coverage.hpp"
#include "sdcc/derive_pipeline.hpp"
#include "sdcc/io.hpp"
#include "sdcc/set_construction.hpp"
#include "sdcc/version.hpp"

namespace sdcc {

namespace {

struct Options {
    std::string schema;
    std::string data;
    std::string target;
    std::string source;
    std::string pool;
    Strength t = kDefaultStrength;
    std::string mode = "strict";
    std::string region_factor;
    std::uint64_t seed = 0;
    std::size_t n_random = 0;
    std::size_t n_not_covered = 0;
    std::string out;
    std::string summary;
    std::string spec;
    std::string artifact;
    bool fit = false;
    std::string schema_out;
};

/// Input file contents plus the provenance block every output document
/// carries.
class Run {
public:
    Run(std::string command, Json flags) : command_(std::move(command)), flags_(std::move(flags)) {}

    std::string load(const std::string& role, const std::string& path) {
        std::string text = read_file(path);
        inputs_[role] = Json{{"path", path}, {"sha256", sha256_hex(text)}};
        return text;
    }

    Json provenance() const {
        return Json{{"tool", Json{{"name", kToolName}, {"version", kVersion}}},
                    {"command", command_},
                    {"flags", flags_},
                    {"inputs", inputs_}};
    }

private:
    std::string command_;
    Json flags_;
    Json inputs_ = Json::object();
};

Json ratio_json(const Ratio& r) {
    return Json{{"numerator", r.numerator},
                {"denominator", r.denominator},
                {"ratio", r.to_string()},
                {"value", r.value()}};
}

Json combination_json(const FactorSchema& schema, const ValueCombination& c) {
    Json obj = Json::object();
    for (const auto& p : c.pairs())
        obj[schema.factor(p.factor).name] = schema.factor(p.factor).values[p.value];
    return obj;
}

std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_file(path, content);
}

SchemaPtr load_schema(Run& run, const std::string& path) {
    return std::make_shared<const FactorSchema>(parse_schema(run.load("schema", path)));
}

Dataset load_dataset(Run& run, const std::string& role, const std::string& path, const SchemaPtr& schema) {
    const std::string text = run.load(role, path);
    try {
        return dataset_from_table(parse_csv(text), schema);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

Json document(const Run& run, Json result) {
    return Json{{"provenance", run.provenance()}, {"result", std::move(result)}};
}

// ---------------------------------------------------------------------------

void cmd_coverage(const Options& o, std::ostream& out) {
    Run run("coverage", Json{{"schema", o.schema}, {"data", o.data}, {"t", o.t}, {"out", o.out}});
    const auto schema = load_schema(run, o.schema);
    const Dataset data = load_dataset(run, "data", o.data, schema);
    const CoverageReport r = combinatorial_coverage(data, o.t);
    emit(o.out,
         render(document(run, Json{{"t", r.t},
                                   {"records", data.size()},
                                   {"covered_count", r.covered_count},
                                   {"universe_count", r.universe_count},
                                   {"cc", ratio_json(r.cc)}})),
         out);
}

void cmd_sdcc(const Options& o, std::ostream& out) {
    Run run("sdcc", Json{{"schema", o.schema},
                         {"target", o.target},
                         {"source", o.source},
                         {"t", o.t},
                         {"out", o.out}});
    const auto schema = load_schema(run, o.schema);
    const Dataset target = load_dataset(run, "target", o.target, schema);
    const Dataset source = load_dataset(run, "source", o.source, schema);
    const SDCCReport r = set_difference_coverage(target, source, o.t);

    Json missing = Json::array();
    for (const auto& c : r.missing_combinations)
        missing.push_back(combination_json(*schema, c));
    Json flags = Json::object();
    std::size_t not_covered = 0;
    for (const auto& [id, covered] : r.per_record_flags) {
        flags[id] = covered;
        not_covered += covered ? 0 : 1;
    }
    emit(o.out,
         render(document(run, Json{{"t", r.t},
                                   {"target_count", r.target_count},
                                   {"missing_count", r.missing_count},
                                   {"sdcc", ratio_json(r.sdcc)},
                                   {"not_covered_records", not_covered},
                                   {"missing_combinations", std::move(missing)},
                                   {"per_record_covered", std::move(flags)}})),
         out);
}

void cmd_partition(const Options& o, std::ostream& out) {
    Run run("partition", Json{{"schema", o.schema},
                              {"target", o.target},
                              {"source", o.source},
                              {"t", o.t},
                              {"mode", o.mode},
                              {"region_factor", o.region_factor},
                              {"out", o.out},
                              {"summary", o.summary}});
    const CoverageMode mode = parse_coverage_mode(o.mode);
    if (mode == CoverageMode::Relaxed && o.region_factor.empty())
        throw Error(ErrorKind::Validation, "--mode relaxed requires --region-factor");
    const auto schema = load_schema(run, o.schema);
    const Dataset target = load_dataset(run, "target", o.target, schema);
    const Dataset source = load_dataset(run, "source", o.source, schema);
    const PartitionResult p = mode == CoverageMode::Strict
                                  ? partition_strict(target, source, o.t)
                                  : partition_relaxed(target, source, o.t, o.region_factor);

    Table table;
    table.header = {"id", "status", "missing_count"};
    if (mode == CoverageMode::Relaxed)
        table.header.push_back("region");
    for (const auto& [id, missing] : p.missing_counts) {
        std::vector<std::string> row{id, p.is_covered(id) ? "covered" : "not_covered",
                                     std::to_string(missing)};
        if (mode == CoverageMode::Relaxed)
            row.push_back(p.regions.at(id));
        table.rows.push_back(std::move(row));
    }

    std::size_t strict_not_covered = 0;
    for (const auto& [id, missing] : p.missing_counts)
        strict_not_covered += missing > 0 ? 1 : 0;
    Json result{{"mode", std::string(to_string(mode))},
                {"t", o.t},
                {"target_records", target.size()},
                {"covered_count", p.covered.size()},
                {"not_covered_count", p.not_covered.size()},
                {"strict_not_covered_count", strict_not_covered}};
    if (mode == CoverageMode::Relaxed) {
        result["region_factor"] = *p.region_factor;
        result["implicated_regions"] = p.implicated_regions;
    }
    const std::string summary = render(document(run, std::move(result)));
    write_file(o.out, format_csv(table));
    emit(o.summary, summary, out);
}

void cmd_select(const Options& o, std::ostream& out) {
    Run run("select", Json{{"schema", o.schema},
                           {"pool", o.pool},
                           {"source", o.source},
                           {"t", o.t},
                           {"n_random", o.n_random},
                           {"n_not_covered", o.n_not_covered},
                           {"mode", o.mode},
                           {"region_factor", o.region_factor},
                           {"seed", o.seed},
                           {"out", o.out},
                           {"summary", o.summary}});
    SelectionRequest request;
    request.t = o.t;
    request.n_random = o.n_random;
    request.n_not_covered = o.n_not_covered;
    request.mode = parse_coverage_mode(o.mode);
    if (!o.region_factor.empty())
        request.region_factor = o.region_factor;
    request.seed = o.seed;

    const auto schema = load_schema(run, o.schema);
    const Dataset pool = load_dataset(run, "pool", o.pool, schema);
    const Dataset source = load_dataset(run, "source", o.source, schema);
    const SelectionPlan plan = select_labeling_batch(pool, source, request);

    Table table;
    table.header = {"id", "stratum"};
    for (const auto& id : plan.not_covered_ids)
        table.rows.push_back({id, "not_covered"});
    for (const auto& id : plan.random_ids)
        table.rows.push_back({id, "random"});

    Json result{{"mode", std::string(to_string(plan.mode))},
                {"seed", plan.seed},
                {"generator", "mt19937_64, rejection-sampled bounded draws, partial Fisher-Yates"},
                {"pool_records", pool.size()},
                {"stratum_size", plan.stratum_size},
                {"requested_not_covered", plan.requested_not_covered},
                {"selected_not_covered", plan.not_covered_ids.size()},
                {"not_covered_shortfall", plan.not_covered_shortfall},
                {"requested_random", plan.requested_random},
                {"selected_random", plan.random_ids.size()},
                {"batch_size", plan.not_covered_ids.size() + plan.random_ids.size()}};
    const std::string summary = render(document(run, std::move(result)));
    write_file(o.out, format_csv(table));
    emit(o.summary, summary, out);
}

void cmd_report(const Options& o, std::ostream& out) {
    Run run("report", Json{{"schema", o.schema},
                           {"target", o.target},
                           {"source", o.source},
                           {"t", o.t},
                           {"out", o.out}});
    const auto schema = load_schema(run, o.schema);
    const Dataset target = load_dataset(run, "target", o.target, schema);
    const Dataset source = load_dataset(run, "source", o.source, schema);
    const GapReport g = coverage_gap_report(target, source, o.t);

    Json per_factor = Json::array();
    for (const auto& f : g.per_factor) {
        Json values = Json::object();
        for (const auto& v : f.values)
            values[v.value] = v.missing_combinations;
        per_factor.push_back(Json{{"factor", f.factor}, {"missing_combinations_by_value", std::move(values)}});
    }
    emit(o.out,
         render(document(run, Json{{"t", g.t},
                                   {"sdcc_forward", ratio_json(g.sdcc_forward)},
                                   {"sdcc_backward", ratio_json(g.sdcc_backward)},
                                   {"covered_count", g.covered_count},
                                   {"not_covered_count", g.not_covered_count},
                                   {"per_factor", std::move(per_factor)}})),
         out);
}

void cmd_derive(const Options& o, std::ostream& out) {
    Run run("derive", Json{{"data", o.data},
                           {"spec", o.spec},
                           {"artifact", o.artifact},
                           {"fit", o.fit},
                           {"out", o.out},
                           {"schema_out", o.schema_out}});
    Json spec_doc;
    const std::string spec_text = run.load("spec", o.spec);
    try {
        spec_doc = Json::parse(spec_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Ingestion, o.spec + ": " + e.what());
    }
    const DerivationSpec spec = derivation_spec_from_json(spec_doc);
    const Table features = parse_csv(run.load("data", o.data));

    FittedArtifacts artifacts;
    if (o.fit) {
        artifacts = fit_artifacts(spec, features);
    } else {
        const std::string text = run.load("artifact", o.artifact);
        try {
            artifacts = artifacts_from_json(Json::parse(text));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::Ingestion, o.artifact + ": " + e.what());
        }
    }

    const Table factors = derive_factors(spec, artifacts, features);
    const FactorSchema schema = derived_schema(spec, artifacts);

    // Render everything before writing so a failure leaves no partial output.
    std::string artifact_text;
    if (o.fit) {
        Json doc = artifacts_to_json(artifacts);
        doc["provenance"] = run.provenance();
        artifact_text = render(doc);
    }
    std::string schema_text;
    if (!o.schema_out.empty()) {
        Json doc = schema_to_json(schema);
        doc["provenance"] = run.provenance();
        schema_text = render(doc);
    }
    if (o.fit)
        write_file(o.artifact, artifact_text);
    if (!o.schema_out.empty())
        write_file(o.schema_out, schema_text);
    emit(o.out, format_csv(factors), out);
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Strength:
    case ErrorKind::Ingestion:
        return 3;
    case ErrorKind::DegenerateSchema:
    case ErrorKind::UndefinedRatio:
    case ErrorKind::Fit:
    case ErrorKind::DegenerateProjection:
    case ErrorKind::Selection:
        return 4;
    case ErrorKind::Io:
        return 5;
    }
    return 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Combinatorial coverage and set-difference coverage toolkit", kToolName};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Options o;

    const auto add_t = [&o](CLI::App* cmd) {
        cmd->add_option("-t,--strength", o.t, "interaction strength t (1 <= t <= k)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    const auto add_schema = [&o](CLI::App* cmd) {
        cmd->add_option("--schema", o.schema, "factor schema document (JSON)")->required();
    };
    const auto add_target_source = [&o](CLI::App* cmd) {
        cmd->add_option("--target", o.target, "target dataset (CSV with id column)")->required();
        cmd->add_option("--source", o.source, "source dataset (CSV with id column)")->required();
    };
    const auto add_mode = [&o](CLI::App* cmd) {
        cmd->add_option("--mode", o.mode, "strict or relaxed")
            ->check(CLI::IsMember({"strict", "relaxed"}))
            ->capture_default_str();
        cmd->add_option("--region-factor", o.region_factor, "factor holding the embedding region");
    };

    auto* derive = app.add_subcommand("derive", "derive discrete factors from raw features");
    derive->add_option("--data", o.data, "raw feature table (CSV with id column)")->required();
    derive->add_option("--spec", o.spec, "derivation spec document (JSON)")->required();
    derive->add_option("--artifact", o.artifact, "fitted-artifact document")->required();
    derive->add_flag("--fit", o.fit, "fit parameters on --data and write --artifact");
    derive->add_option("--out", o.out, "factor table output (default stdout)");
    derive->add_option("--schema-out", o.schema_out, "write the derived factor schema here");

    auto* coverage = app.add_subcommand("coverage", "t-way combinatorial coverage of a dataset");
    add_schema(coverage);
    coverage->add_option("--data", o.data, "dataset (CSV with id column)")->required();
    add_t(coverage);
    coverage->add_option("--out", o.out, "report output (default stdout)");

    auto* sdcc_cmd = app.add_subcommand("sdcc", "set-difference combinatorial coverage of target vs source");
    add_schema(sdcc_cmd);
    add_target_source(sdcc_cmd);
    add_t(sdcc_cmd);
    sdcc_cmd->add_option("--out", o.out, "report output (default stdout)");

    auto* partition = app.add_subcommand("partition", "split target records into covered / not covered");
    add_schema(partition);
    add_target_source(partition);
    add_t(partition);
    add_mode(partition);
    partition->add_option("--out", o.out, "partition table output (CSV)")->required();
    partition->add_option("--summary", o.summary, "summary document output (default stdout)");

    auto* select = app.add_subcommand("select", "seeded labeling batch with not-covered mix-ins");
    add_schema(select);
    select->add_option("--pool", o.pool, "candidate pool (CSV with id column)")->required();
    select->add_option("--source", o.source, "already-labeled source dataset")->required();
    add_t(select);
    add_mode(select);
    select->add_option("--n-random", o.n_random, "size of the random sample")->capture_default_str();
    select->add_option("--n-not-covered", o.n_not_covered, "number of not-covered mix-ins")
        ->capture_default_str();
    select->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
    select->add_option("--out", o.out, "selection table output (CSV)")->required();
    select->add_option("--summary", o.summary, "summary document output (default stdout)");

    auto* report = app.add_subcommand("report", "two-way coverage gap diagnostics");
    add_schema(report);
    add_target_source(report);
    add_t(report);
    report->add_option("--out", o.out, "report output (default stdout)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (derive->parsed())
            cmd_derive(o, out);
        else if (coverage->parsed())
            cmd_coverage(o, out);
        else if (sdcc_cmd->parsed())
            cmd_sdcc(o, out);
        else if (partition->parsed())
            cmd_partition(o, out);
        else if (select->parsed())
            cmd_select(o, out);
        else if (report->parsed())
            cmd_report(o, out);
    } catch (const Error& e) {
        err << kToolName << ": error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << kToolName << ": error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace sdcc
