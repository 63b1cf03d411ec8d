#include <pybind11/chrono.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pubtrend/count_cache.hpp"
#include "pubtrend/entrez_client.hpp"
#include "pubtrend/error.hpp"
#include "pubtrend/report.hpp"
#include "pubtrend/study.hpp"

namespace py = pybind11;
using namespace pubtrend;

namespace {

LabeledSeries labeled(const std::string& label, const py::object& series) {
    if (py::isinstance<CountSeries>(series)) return {label, series.cast<CountSeries>()};
    return {label, series.cast<RatioSeries>()};
}

std::vector<LabeledSeries> labeled_all(const std::vector<std::pair<std::string, py::object>>& items) {
    std::vector<LabeledSeries> out;
    for (const auto& [label, series] : items) out.push_back(labeled(label, series));
    return out;
}

}  // namespace

PYBIND11_MODULE(_pubtrend, m) {
    m.doc() = "Yearly PubMed publication counts normalised against reference keywords.";

    static py::exception<Error> error(m, "PubtrendError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error.ptr())(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    py::enum_<Field>(m, "Field").value("TEXT", Field::Text).value("MESH", Field::Mesh);

    py::class_<KeywordSpec>(m, "KeywordSpec")
        .def(py::init<std::string, Field, std::string>(), py::arg("term"), py::arg("field") = Field::Text,
             py::arg("database") = "pubmed")
        .def_property_readonly("term", &KeywordSpec::term)
        .def_property_readonly("field", &KeywordSpec::field)
        .def_property_readonly("database", &KeywordSpec::database)
        .def(py::self == py::self)
        .def("__repr__", [](const KeywordSpec& k) {
            return "KeywordSpec('" + k.term() + "', " + std::string(field_tag(k.field())) + ", '" + k.database() + "')";
        });

    py::class_<CountSeries>(m, "CountSeries")
        .def(py::init<KeywordSpec, std::map<int, Count>>(), py::arg("keyword"), py::arg("counts"))
        .def_property_readonly("keyword", &CountSeries::keyword)
        .def_property_readonly("counts", &CountSeries::counts)
        .def("is_contiguous", &CountSeries::is_contiguous)
        .def("at", &CountSeries::at, py::arg("year"))
        .def(py::self == py::self);

    py::class_<RatioSeries>(m, "RatioSeries")
        .def(py::init<KeywordSpec, std::string, std::map<int, RatioSeries::Value>>(), py::arg("keyword"),
             py::arg("reference_label"), py::arg("values"))
        .def_property_readonly("keyword", &RatioSeries::keyword)
        .def_property_readonly("reference_label", &RatioSeries::reference_label)
        .def_property_readonly("values", &RatioSeries::values)
        .def("defined_values", &RatioSeries::defined_values)
        .def(py::self == py::self);

    py::class_<DipWarning>(m, "DipWarning")
        .def_readonly("year", &DipWarning::year)
        .def_readonly("final_count", &DipWarning::final_count)
        .def_readonly("previous_count", &DipWarning::previous_count)
        .def_readonly("ratio", &DipWarning::ratio);

    m.def("build_term", &build_term, py::arg("spec"), py::arg("year"));
    m.def("encode_term", [](const std::string& s) { return encode_term(s); });
    m.def("decode_term", [](const std::string& s) { return decode_term(s); });
    m.def(
        "encode_request",
        [](const KeywordSpec& spec, int year, std::optional<std::string> api_key) {
            std::optional<Credentials> credentials;
            if (api_key) credentials = Credentials{api_key, std::nullopt, std::nullopt};
            return encode_request(EntrezQuery::for_year(spec, year, credentials));
        },
        py::arg("spec"), py::arg("year"), py::arg("api_key") = py::none());
    m.def(
        "parse_count", [](int status, std::string body) { return parse_count({status, std::move(body)}); },
        py::arg("status"), py::arg("body"));

    m.def("align_years", [](const std::vector<CountSeries>& s) { return align_years(s); });
    m.def("normalize_by_reference", &normalize_by_reference, py::arg("keyword"), py::arg("reference"));
    m.def(
        "normalize_by_set",
        [](const CountSeries& k, const std::vector<CountSeries>& refs) {
            return normalize_by_set(k, ComparisonSet(refs));
        },
        py::arg("keyword"), py::arg("references"));
    m.def("stability_score", &stability_score, py::arg("ratios"));
    m.def("detect_trailing_dip", &detect_trailing_dip, py::arg("series"));

    m.def(
        "to_csv",
        [](const std::vector<std::pair<std::string, py::object>>& items) { return to_csv(labeled_all(items)); },
        py::arg("series"), "CSV for a list of (label, CountSeries | RatioSeries) pairs.");
    m.def(
        "render_svg",
        [](const std::string& title, const std::vector<std::pair<std::string, py::object>>& items,
           const std::string& y_label, bool log_scale) {
            ChartSpec spec;
            spec.title = title;
            spec.series = labeled_all(items);
            spec.y_label = y_label;
            spec.log_scale = log_scale;
            return render_svg(spec);
        },
        py::arg("title"), py::arg("series"), py::arg("y_label") = "", py::arg("log_scale") = false);

    py::class_<CountCache>(m, "CountCache")
        .def(py::init<>())
        .def_static("load", [](const std::filesystem::path& p) { return std::make_unique<CountCache>(CountCache::load(p)); })
        .def(
            "get",
            [](const CountCache& c, const std::string& db, const std::string& term) { return c.get(db, term); },
            py::arg("database"), py::arg("term_string"))
        .def(
            "put",
            [](CountCache& c, const std::string& db, const std::string& term, std::int64_t count,
               std::chrono::system_clock::time_point at) { c.put({db, term, count, at}); },
            py::arg("database"), py::arg("term_string"), py::arg("count"), py::arg("fetched_at"))
        .def("flush", &CountCache::flush)
        .def("__len__", &CountCache::size)
        .def_property_readonly("corrupt_lines", &CountCache::corrupt_lines)
        .def_property_readonly("pending", &CountCache::pending);

    m.def(
        "fetch_replay",
        [](const std::filesystem::path& fixtures, const KeywordSpec& spec, int first, int last) {
            ReplayTransport replay(fixtures);
            ManualClock clock;
            RateLimiter limiter(1 << 20, clock);
            EntrezClient client(replay, limiter, clock);
            return client.fetch_year_series(spec, {first, last});
        },
        py::arg("fixtures"), py::arg("spec"), py::arg("first"), py::arg("last"),
        "Yearly counts served from a recorded fixture file.");

    m.def(
        "run",
        [](const std::vector<std::string>& args, std::optional<Environment> env) {
            std::ostringstream out, err;
            RunContext context{out, err};
            int code;
            {
                py::gil_scoped_release release;
                code = run_command(args, env ? *env : process_environment(), context);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), py::arg("env") = py::none(),
        "Runs the command line tool in-process. Returns (exit_code, stdout, stderr).");
}
