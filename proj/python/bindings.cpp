#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdcc/coverage.hpp"
#include "sdcc/derivation.hpp"
#include "sdcc/io.hpp"
#include "sdcc/set_construction.hpp"
#include "sdcc/version.hpp"

namespace py = pybind11;
using namespace sdcc;

namespace {

using Labels = std::vector<std::string>;

SchemaPtr make_schema(const std::vector<std::pair<std::string, Labels>>& factors,
                      const std::vector<std::map<std::string, std::string>>& constraints) {
    std::vector<Factor> fs;
    for (const auto& [name, values] : factors)
        fs.push_back({name, values});
    const FactorSchema plain(fs);
    std::vector<ValueCombination> cs;
    for (const auto& c : constraints) {
        std::vector<Assignment> pairs;
        for (const auto& [name, label] : c) {
            const auto f = plain.find_factor(name);
            if (!f)
                throw Error(ErrorKind::Validation, "constraint references unknown factor '" + name + "'");
            const auto v = plain.find_value(*f, label);
            if (!v)
                throw Error(ErrorKind::Validation, "constraint references unknown value '" + label + "'");
            pairs.push_back({*f, *v});
        }
        cs.emplace_back(std::move(pairs));
    }
    return std::make_shared<const FactorSchema>(std::move(fs), std::move(cs));
}

Record make_record(const FactorSchema& schema, const std::string& id, const Labels& labels) {
    if (labels.size() != schema.factor_count())
        throw Error(ErrorKind::Validation, "record '" + id + "' has the wrong number of values");
    Record r{id, {}};
    for (std::size_t f = 0; f < labels.size(); ++f) {
        const auto v = schema.find_value(f, labels[f]);
        if (!v)
            throw Error(ErrorKind::Validation, "unknown value '" + labels[f] + "' for factor '" +
                                                   schema.factor(f).name + "'");
        r.values.push_back(*v);
    }
    return r;
}

py::dict combination_dict(const FactorSchema& schema, const ValueCombination& c) {
    py::dict d;
    for (const auto& p : c.pairs())
        d[py::str(schema.factor(p.factor).name)] = schema.factor(p.factor).values[p.value];
    return d;
}

py::list combination_list(const FactorSchema& schema, const std::vector<ValueCombination>& cs) {
    py::list out;
    for (const auto& c : cs)
        out.append(combination_dict(schema, c));
    return out;
}

py::dict ratio_dict(const Ratio& r) {
    py::dict d;
    d["numerator"] = r.numerator;
    d["denominator"] = r.denominator;
    d["value"] = r.value();
    return d;
}

py::dict partition_dict(const PartitionResult& p) {
    py::dict d;
    d["mode"] = std::string(to_string(p.mode));
    d["covered"] = p.covered;
    d["not_covered"] = p.not_covered;
    d["missing_counts"] = p.missing_counts;
    if (p.region_factor) {
        d["region_factor"] = *p.region_factor;
        d["implicated_regions"] = p.implicated_regions;
    }
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Combinatorial coverage and set-difference combinatorial coverage.";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "SdccError", PyExc_ValueError);

    py::class_<FactorSchema, std::shared_ptr<FactorSchema>>(m, "Schema")
        .def(py::init([](const std::vector<std::pair<std::string, Labels>>& factors,
                         const std::vector<std::map<std::string, std::string>>& constraints) {
                 return std::const_pointer_cast<FactorSchema>(make_schema(factors, constraints));
             }),
             py::arg("factors"), py::arg("constraints") = std::vector<std::map<std::string, std::string>>{})
        .def_static("from_json", [](const std::string& text) {
            return std::make_shared<FactorSchema>(parse_schema(text));
        })
        .def("to_json", [](const FactorSchema& s) { return schema_to_json(s).dump(); })
        .def_property_readonly("factor_names", [](const FactorSchema& s) {
            Labels out;
            for (const auto& f : s.factors())
                out.push_back(f.name);
            return out;
        })
        .def("values", [](const FactorSchema& s, const std::string& name) {
            const auto f = s.find_factor(name);
            if (!f)
                throw Error(ErrorKind::Validation, "unknown factor '" + name + "'");
            return s.factor(*f).values;
        })
        .def("__len__", &FactorSchema::factor_count);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](const std::shared_ptr<FactorSchema>& schema,
                         const std::vector<std::pair<std::string, Labels>>& rows) {
                 std::vector<Record> records;
                 records.reserve(rows.size());
                 for (const auto& [id, labels] : rows)
                     records.push_back(make_record(*schema, id, labels));
                 return Dataset(schema, std::move(records));
             }),
             py::arg("schema"), py::arg("rows"))
        .def_static("from_csv", [](const std::shared_ptr<FactorSchema>& schema, const std::string& text) {
            return dataset_from_table(parse_csv(text), schema);
        })
        .def_property_readonly("ids", [](const Dataset& d) {
            Labels out;
            for (const auto& r : d.records())
                out.push_back(r.id);
            return out;
        })
        .def("__len__", &Dataset::size);

    m.def("combos_of_record",
          [](const std::shared_ptr<FactorSchema>& schema, const Labels& labels, Strength t) {
              const Record r = make_record(*schema, "record", labels);
              return combination_list(*schema, combos_of_record(r, *schema, t).members());
          },
          py::arg("schema"), py::arg("labels"), py::arg("t") = kDefaultStrength);
    m.def("build_combination_set",
          [](const Dataset& d, Strength t) {
              return combination_list(d.schema(), build_combination_set(d, t).members());
          },
          py::arg("data"), py::arg("t") = kDefaultStrength);
    m.def("universe_count", [](const std::shared_ptr<FactorSchema>& s, Strength t) { return universe_count(*s, t); },
          py::arg("schema"), py::arg("t") = kDefaultStrength);
    m.def("combinatorial_coverage",
          [](const Dataset& d, Strength t) {
              const auto r = combinatorial_coverage(d, t);
              py::dict out;
              out["t"] = r.t;
              out["covered_count"] = r.covered_count;
              out["universe_count"] = r.universe_count;
              out["cc"] = ratio_dict(r.cc);
              return out;
          },
          py::arg("data"), py::arg("t") = kDefaultStrength);
    m.def("sdcc",
          [](const Dataset& target, const Dataset& source, Strength t) {
              const auto r = sdcc::set_difference_coverage(target, source, t);
              py::dict out;
              out["t"] = r.t;
              out["target_count"] = r.target_count;
              out["missing_count"] = r.missing_count;
              out["sdcc"] = ratio_dict(r.sdcc);
              out["missing_combinations"] = combination_list(target.schema(), r.missing_combinations);
              out["per_record_flags"] = r.per_record_flags;
              return out;
          },
          py::arg("target"), py::arg("source"), py::arg("t") = kDefaultStrength);

    m.def("partition_strict",
          [](const Dataset& target, const Dataset& source, Strength t) {
              return partition_dict(partition_strict(target, source, t));
          },
          py::arg("target"), py::arg("source"), py::arg("t") = kDefaultStrength);
    m.def("partition_relaxed",
          [](const Dataset& target, const Dataset& source, Strength t, const std::string& region) {
              return partition_dict(partition_relaxed(target, source, t, region));
          },
          py::arg("target"), py::arg("source"), py::arg("t") = kDefaultStrength,
          py::arg("region_factor"));
    m.def("coverage_gap_report",
          [](const Dataset& target, const Dataset& source, Strength t) {
              const auto g = coverage_gap_report(target, source, t);
              py::dict out;
              out["t"] = g.t;
              out["sdcc_forward"] = ratio_dict(g.sdcc_forward);
              out["sdcc_backward"] = ratio_dict(g.sdcc_backward);
              out["covered_count"] = g.covered_count;
              out["not_covered_count"] = g.not_covered_count;
              py::dict per_factor;
              for (const auto& f : g.per_factor) {
                  py::dict values;
                  for (const auto& v : f.values)
                      values[py::str(v.value)] = v.missing_combinations;
                  per_factor[py::str(f.factor)] = values;
              }
              out["per_factor"] = per_factor;
              return out;
          },
          py::arg("target"), py::arg("source"), py::arg("t") = kDefaultStrength);
    m.def("select_labeling_batch",
          [](const Dataset& pool, const Dataset& source, Strength t, std::size_t n_random,
             std::size_t n_not_covered, const std::string& mode, std::optional<std::string> region_factor,
             std::uint64_t seed) {
              SelectionRequest req{t, n_random, n_not_covered, parse_coverage_mode(mode),
                                   std::move(region_factor), seed};
              const auto plan = select_labeling_batch(pool, source, req);
              py::dict out;
              out["seed"] = plan.seed;
              out["mode"] = std::string(to_string(plan.mode));
              out["not_covered_ids"] = plan.not_covered_ids;
              out["random_ids"] = plan.random_ids;
              out["stratum_size"] = plan.stratum_size;
              out["not_covered_shortfall"] = plan.not_covered_shortfall;
              return out;
          },
          py::arg("pool"), py::arg("source"), py::arg("t") = kDefaultStrength, py::arg("n_random") = 0,
          py::arg("n_not_covered") = 0, py::arg("mode") = "strict", py::arg("region_factor") = py::none(),
          py::arg("seed") = 0);

    py::class_<QuantileBinning>(m, "QuantileBinning")
        .def_readonly("levels", &QuantileBinning::levels)
        .def_readonly("edges", &QuantileBinning::edges)
        .def_property_readonly("bin_count", &QuantileBinning::bin_count);
    m.def("fit_quantile_bins",
          [](const std::vector<double>& values, const std::vector<double>& levels) {
              return fit_quantile_bins(values, levels);
          },
          py::arg("values"), py::arg("levels") = std::vector<double>{0.25, 0.5, 0.75});
    m.def("assign_bin", &assign_bin, py::arg("x"), py::arg("binning"));
    m.def("apply_predicate",
          [](const Labels& labels, const Labels& domain, const Labels& true_set) {
              const PredicateFactor spec{"predicate", "label", domain, {true_set.begin(), true_set.end()}};
              const auto flags = apply_predicate(labels, spec);
              return std::vector<bool>(flags.begin(), flags.end());
          },
          py::arg("labels"), py::arg("domain"), py::arg("true_set"));

    py::class_<Projection2D>(m, "Projection2D")
        .def_readonly("mean", &Projection2D::mean)
        .def_readonly("components", &Projection2D::components)
        .def_readonly("explained_variance", &Projection2D::explained_variance)
        .def_readonly("axis_min", &Projection2D::axis_min)
        .def_readonly("axis_max", &Projection2D::axis_max);
    m.def("fit_projection", [](const Eigen::MatrixXd& x) { return fit_projection(x); }, py::arg("embeddings"));
    m.def("project_and_scale",
          [](const Eigen::MatrixXd& x, const Projection2D& p) {
              const auto pts = project_and_scale(x, p);
              Eigen::MatrixX2d out(static_cast<Eigen::Index>(pts.size()), 2);
              for (std::size_t i = 0; i < pts.size(); ++i)
                  out.row(static_cast<Eigen::Index>(i)) << pts[i].x, pts[i].y;
              return out;
          },
          py::arg("embeddings"), py::arg("projection"));
    m.def("region_of",
          [](double x, double y, std::size_t cells_per_axis) {
              return region_of({x, y}, GridPartition{cells_per_axis});
          },
          py::arg("x"), py::arg("y"), py::arg("cells_per_axis") = 5);
}
