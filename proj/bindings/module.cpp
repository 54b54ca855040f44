#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ricmatch/experiments.hpp"
#include "ricmatch/matching.hpp"
#include "ricmatch/netcost.hpp"
#include "ricmatch/nn.hpp"
#include "ricmatch/preprocess.hpp"
#include "ricmatch/svg.hpp"
#include "ricmatch/trace.hpp"
#include "ricmatch/xapp.hpp"

namespace py = pybind11;
using namespace ricmatch;

namespace {

TraceKind kind_from_string(const std::string& s) {
    if (s == "per_ue") return TraceKind::PerUe;
    if (s == "per_ru") return TraceKind::PerRu;
    throw DataError("unknown trace kind: " + s);
}

std::string kind_to_string(TraceKind k) {
    return k == TraceKind::PerUe ? "per_ue" : "per_ru";
}

}  // namespace

PYBIND11_MODULE(_ricmatch, m) {
    m.doc() = "Data-to-model matching simulation core";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");

    py::class_<GenConfig>(m, "GenConfig")
        .def(py::init<>())
        .def_readwrite("n_rus", &GenConfig::n_rus)
        .def_readwrite("samples_per_ru", &GenConfig::samples_per_ru)
        .def_readwrite("seed", &GenConfig::seed)
        .def_readwrite("load_scale", &GenConfig::load_scale)
        .def_readwrite("spectral_bias", &GenConfig::spectral_bias)
        .def_readwrite("zero_prob", &GenConfig::zero_prob)
        .def_readwrite("noise_sigma", &GenConfig::noise_sigma);

    py::class_<Trace>(m, "Trace")
        .def_property_readonly("kind", [](const Trace& t) { return kind_to_string(t.kind); })
        .def_readonly("ru_ids", &Trace::ru_ids)
        .def_readonly("provenance", &Trace::provenance)
        .def("__len__", [](const Trace& t) { return t.size(); })
        .def("to_csv", [](const Trace& t) { return write_csv(t); });

    m.def("gen_homogeneous", &gen_homogeneous, py::arg("config"));
    m.def("gen_heterogeneous", &gen_heterogeneous, py::arg("config"));
    m.def("parse_csv", [](const std::string& text, const std::string& kind) {
        std::istringstream in(text);
        return parse_csv(in, kind_from_string(kind));
    }, py::arg("text"), py::arg("kind"));
    m.def("parse_csv_file", [](const std::string& path, const std::string& kind) {
        return parse_csv_file(path, kind_from_string(kind));
    }, py::arg("path"), py::arg("kind"));

    py::class_<MatchingPlan>(m, "MatchingPlan")
        .def("to_json", &plan_to_json)
        .def_static("from_json", &plan_from_json, pybind11::arg("json_text"),
                    pybind11::arg("ru_ids"));
    m.def("plan_hoard", &plan_hoard, py::arg("ru_ids"));
    m.def("plan_choose_single", &plan_choose_single, py::arg("source_ru"), py::arg("target_ru"),
          py::arg("ru_ids"));
    m.def("validate_plan", &validate_plan, py::arg("plan"));

    m.def("wasserstein1", &wasserstein1, py::arg("a"), py::arg("b"));
    m.def("heterogeneity_score", &heterogeneity_score, py::arg("trace"));

    py::class_<LinkModel>(m, "LinkModel")
        .def(py::init<>())
        .def_readwrite("bandwidth_bps", &LinkModel::bandwidth_bps)
        .def_readwrite("base_latency_s", &LinkModel::base_latency_s)
        .def_readwrite("record_size_bytes", &LinkModel::record_size_bytes);
    py::class_<ComputeModel>(m, "ComputeModel")
        .def(py::init<>())
        .def_readwrite("c_per_sample_s", &ComputeModel::c_per_sample_s)
        .def_readwrite("c_fixed_s", &ComputeModel::c_fixed_s);
    py::class_<CostReport>(m, "CostReport")
        .def_readonly("bytes_moved", &CostReport::bytes_moved)
        .def_readonly("transfer_delay_s", &CostReport::transfer_delay_s);
    m.def("transfer_delay", &transfer_delay, py::arg("plan"), py::arg("trace"), py::arg("links"),
          py::arg("serial_transfers") = false);
    m.def("normalized_time_unit", &normalized_time_unit, py::arg("trace"), py::arg("compute"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("time_budget_s", &TrainConfig::time_budget_s)
        .def_readwrite("c_per_sample_s", &TrainConfig::c_per_sample_s)
        .def_readwrite("c_fixed_s", &TrainConfig::c_fixed_s);

    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("plan_id", &CurvePoint::plan_id)
        .def_readonly("x", &CurvePoint::x)
        .def_readonly("seed", &CurvePoint::seed)
        .def_readonly("metric", &CurvePoint::metric)
        .def_readonly("bytes_moved", &CurvePoint::bytes_moved)
        .def_readonly("transfer_delay_s", &CurvePoint::transfer_delay_s)
        .def_readonly("epochs", &CurvePoint::epochs)
        .def_readonly("skipped", &CurvePoint::skipped);
    py::class_<EnvelopePoint>(m, "EnvelopePoint")
        .def_readonly("x", &EnvelopePoint::x)
        .def_readonly("plan_id", &EnvelopePoint::plan_id)
        .def_readonly("metric", &EnvelopePoint::metric);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("sweep_kind", &SweepResult::sweep_kind)
        .def_readonly("metric_is_accuracy", &SweepResult::metric_is_accuracy)
        .def_readonly("points", &SweepResult::points)
        .def_readonly("envelope", &SweepResult::envelope)
        .def("to_csv", &sweep_csv)
        .def("summary_json", &sweep_summary_json)
        .def("chart_svg", &sweep_chart_svg);

    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init<>())
        .def_readwrite("target_ru", &SweepConfig::target_ru)
        .def_readwrite("plans", &SweepConfig::plans)
        .def_readwrite("x_values", &SweepConfig::x_values)
        .def_readwrite("train", &SweepConfig::train)
        .def_readwrite("seeds", &SweepConfig::seeds)
        .def_readwrite("links", &SweepConfig::links)
        .def_readwrite("compute", &SweepConfig::compute)
        .def_readwrite("jobs", &SweepConfig::jobs);

    m.def("sweep_data_fraction", &sweep_data_fraction, py::arg("trace"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep_time_budget", &sweep_time_budget, py::arg("trace"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<QpConfig>(m, "QpConfig")
        .def(py::init<>())
        .def_readwrite("threshold_bps", &QpConfig::threshold_bps)
        .def_readwrite("sample_counts", &QpConfig::sample_counts)
        .def_readwrite("mtc_only", &QpConfig::mtc_only);
    m.def("sweep_xapp", &sweep_xapp, py::arg("trace"), py::arg("config"), py::arg("qp"),
          py::call_guard<py::gil_scoped_release>());
}
