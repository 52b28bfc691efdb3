#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "spndiff/cipher_model.hpp"
#include "spndiff/diff_exhaustive.hpp"
#include "spndiff/reports.hpp"
#include "spndiff/sbox_analysis.hpp"
#include "spndiff/trail_search.hpp"
#include "spndiff/verifier.hpp"

namespace py = pybind11;
using namespace spndiff;

namespace {

KeyAssignment key_or_zero(const CipherDescription& desc, const std::optional<std::vector<Word>>& key) {
  return key ? KeyAssignment{*key} : desc.zero_key();
}

py::list characteristics(const std::vector<Characteristic>& cs) {
  py::list out;
  for (const auto& c : cs) out.append(py::make_tuple(c.input_diff, c.output_diff, c.count));
  return out;
}

py::dict trail_dict(const Trail& t) {
  py::dict d;
  d["diffs"] = t.round_diffs;
  d["active_count"] = t.active_count;
  d["probability"] = t.probability.str();
  d["log2"] = t.probability.log2();
  return d;
}

}  // namespace

PYBIND11_MODULE(spndiff, m) {
  m.doc() = "Exact differential analysis of 16-bit SPN ciphers";
  m.attr("__version__") = SPNDIFF_VERSION;

  py::register_exception<DescriptionError>(m, "DescriptionError", PyExc_ValueError);

  py::class_<CipherDescription>(m, "Description")
      .def_property_readonly("name", &CipherDescription::name)
      .def_property_readonly("rounds", &CipherDescription::rounds)
      .def_property_readonly("key_slots", &CipherDescription::key_slots)
      .def("with_rounds", &CipherDescription::with_rounds, py::arg("rounds"))
      .def("sbox_hex", [](const CipherDescription& d, const std::string& id) { return d.sbox(id).hex(); })
      .def("format", [](const CipherDescription& d) { return format_description(d); })
      .def(
          "eval",
          [](const CipherDescription& d, Word x, std::optional<std::vector<Word>> key) {
            return eval(d, key_or_zero(d, key), x);
          },
          py::arg("x"), py::arg("key") = py::none())
      .def(
          "eval_inverse",
          [](const CipherDescription& d, Word y, std::optional<std::vector<Word>> key) {
            return eval_inverse(d, key_or_zero(d, key), y);
          },
          py::arg("y"), py::arg("key") = py::none())
      .def("__repr__", [](const CipherDescription& d) {
        return "<Description " + d.name() + ", " + std::to_string(d.rounds()) + " rounds>";
      });

  m.def("load_description", &load_description, py::arg("path"));
  m.def("parse_description", [](const std::string& text) { return parse_description(text); }, py::arg("text"));

  m.def(
      "ddt",
      [](const std::string& hex) {
        const auto d = compute_ddt(SBox4::from_hex("s", hex));
        std::vector<std::vector<unsigned>> rows(16, std::vector<unsigned>(16));
        for (unsigned a = 0; a < 16; ++a) {
          for (unsigned b = 0; b < 16; ++b) rows[a][b] = d.at(a, b);
        }
        return rows;
      },
      py::arg("sbox_hex"), "DDT of a 4-bit S-box given as 16 hex digits");
  m.def(
      "uniformity", [](const std::string& hex) { return compute_ddt(SBox4::from_hex("s", hex)).uniformity(); },
      py::arg("sbox_hex"));

  m.def(
      "diff_count",
      [](const CipherDescription& d, Word a, Word b, std::optional<std::vector<Word>> key) {
        return diff_count(d, key_or_zero(d, key), a, b);
      },
      py::arg("desc"), py::arg("a"), py::arg("b"), py::arg("key") = py::none());

  m.def(
      "scan_max",
      [](const CipherDescription& d, std::optional<unsigned> rounds, std::optional<std::vector<Word>> key,
         unsigned jobs) {
        ScanOptions opts;
        opts.rounds = rounds;
        opts.jobs = jobs;
        const auto k = key_or_zero(d, key);
        DiffDistribution dist;
        {
          py::gil_scoped_release release;
          dist = scan_max(d, k, opts);
        }
        py::dict out;
        out["max_count"] = dist.max_count;
        out["argmax"] = characteristics(dist.argmax);
        return out;
      },
      py::arg("desc"), py::arg("rounds") = py::none(), py::arg("key") = py::none(), py::arg("jobs") = 0,
      "Maximum D(a, b) over a != 0 with every (a, b, count) reaching it");

  m.def(
      "top_characteristics",
      [](const CipherDescription& d, std::optional<std::uint32_t> threshold, std::optional<unsigned> rounds,
         unsigned jobs) {
        ScanOptions opts;
        opts.rounds = rounds;
        opts.jobs = jobs;
        std::vector<Characteristic> cs;
        {
          py::gil_scoped_release release;
          cs = top_characteristics(d, d.zero_key(), threshold, opts);
        }
        return characteristics(cs);
      },
      py::arg("desc"), py::arg("threshold") = py::none(), py::arg("rounds") = py::none(), py::arg("jobs") = 0);

  m.def("min_active_sboxes", &min_active_sboxes, py::arg("desc"), py::arg("rounds"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "best_trail",
      [](const CipherDescription& d, unsigned rounds) {
        Trail t;
        {
          py::gil_scoped_release release;
          t = best_trail(d, rounds);
        }
        return trail_dict(t);
      },
      py::arg("desc"), py::arg("rounds"));

  m.def(
      "verify_exhaustive",
      [](const CipherDescription& d, Word a, Word b, std::optional<std::vector<Word>> key) {
        return verify_exhaustive(d, key_or_zero(d, key), a, b).count;
      },
      py::arg("desc"), py::arg("a"), py::arg("b"), py::arg("key") = py::none());
  m.def(
      "verify_keyed",
      [](const CipherDescription& d, Word a, Word b, std::uint32_t keys, std::uint64_t seed, unsigned jobs) {
        VerificationResult r;
        {
          py::gil_scoped_release release;
          r = verify_keyed(d, a, b, keys, seed, jobs);
        }
        py::dict out;
        out["mean"] = r.mean;
        out["stderr"] = r.stderr_;
        out["per_key_counts"] = r.per_key_counts;
        out["seed"] = r.seed;
        return out;
      },
      py::arg("desc"), py::arg("a"), py::arg("b"), py::arg("keys"), py::arg("seed") = 1, py::arg("jobs") = 0);

  m.def("parse_difference", [](const std::string& s) { return parse_difference(s); }, py::arg("text"));
  m.def("format_nibbles", &format_nibbles, py::arg("value"));

  m.def(
      "theorem_lower_bound",
      [](int i) {
        const auto c = theorem_lower_bound(i);
        return py::make_tuple(c.decompositions, c.total);
      },
      py::arg("i"));
  m.def(
      "cipher_bound",
      [](unsigned per_unit, unsigned units, long num, long den) {
        return to_power_string(cipher_bound(per_unit, units, Rational(num, den)));
      },
      py::arg("min_active_per_unit"), py::arg("units"), py::arg("num") = 1, py::arg("den") = 4);

  m.def(
      "report_json",
      [](const CipherDescription& d, unsigned max_rounds, unsigned jobs, bool trails) {
        ReportOptions opts;
        opts.max_rounds = max_rounds;
        opts.jobs = jobs;
        opts.trails = trails;
        py::gil_scoped_release release;
        return report_json(build_report(d, opts));
      },
      py::arg("desc"), py::arg("max_rounds") = 4, py::arg("jobs") = 0, py::arg("trails") = true);
}
