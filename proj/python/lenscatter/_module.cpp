#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "lenscatter/experiments.hpp"
#include "lenscatter/hermite.hpp"
#include "lenscatter/lens.hpp"
#include "lenscatter/random_data.hpp"
#include "lenscatter/stationary.hpp"

namespace py = pybind11;
using namespace lenscatter;

namespace {

using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

std::vector<cplx> vector_from(const ComplexArray& arr) {
  if (arr.ndim() != 1)
    throw std::invalid_argument("expected a one-dimensional complex array");
  std::vector<cplx> v(static_cast<size_t>(arr.shape(0)));
  std::memcpy(v.data(), arr.data(), sizeof(cplx) * v.size());
  return v;
}

SpectralField field_from(const ComplexArray& arr) {
  SpectralField f;
  f.coeffs = vector_from(arr);
  return f;
}

py::array_t<std::complex<double>> to_array(const std::vector<cplx>& v) {
  py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), sizeof(cplx) * v.size());
  return out;
}

py::array_t<double> to_real_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), sizeof(double) * v.size());
  return out;
}

RandomKind kind_from(const std::string& name) {
  if (name == "unit_square") return RandomKind::unit_square;
  if (name == "lambda_weighted") return RandomKind::lambda_weighted;
  throw std::invalid_argument("unknown random kind '" + name +
                              "'; use unit_square or lambda_weighted");
}

}  // namespace

PYBIND11_MODULE(_lenscatter, m) {
  m.doc() = "Hermite-spectral scattering operator for the 1d nonlinear "
            "Schrodinger equation";
  m.attr("__version__") = kVersion;

  py::class_<TransformPlan>(m, "TransformPlan",
                            "Gauss quadrature rule plus the coefficient/node "
                            "transforms for a fixed mode count")
      .def(py::init<int>(), py::arg("modes"))
      .def_property_readonly("modes", &TransformPlan::modes)
      .def_property_readonly(
          "nodes",
          [](const TransformPlan& p) { return to_real_array(p.rule().nodes); })
      .def_property_readonly("scaled_weights",
                             [](const TransformPlan& p) {
                               return to_real_array(p.scaled_weights());
                             })
      .def(
          "synthesize",
          [](const TransformPlan& p, const ComplexArray& coeffs) {
            return to_array(p.synthesize(field_from(coeffs)));
          },
          py::arg("coeffs"), "Coefficients to values at the quadrature nodes")
      .def(
          "analyze",
          [](const TransformPlan& p, const ComplexArray& values) {
            return to_array(p.analyze(vector_from(values)).coeffs);
          },
          py::arg("values"), "Values at the quadrature nodes to coefficients");

  m.def(
      "evaluate_at",
      [](const ComplexArray& coeffs, const std::vector<double>& points) {
        return to_array(evaluate_at(field_from(coeffs), points));
      },
      py::arg("coeffs"), py::arg("points"),
      "Evaluate a coefficient vector at arbitrary points");

  m.def(
      "fourier",
      [](const ComplexArray& coeffs) {
        return to_array(fourier(field_from(coeffs)).coeffs);
      },
      py::arg("coeffs"), "Exact Fourier transform in coefficient space");

  m.def(
      "scatter",
      [](const TransformPlan& plan, const ComplexArray& u_minus, double sigma,
         int sign, double tau, double coupling, bool long_range,
         double endpoint_offset) {
        ScatterConfig cfg;
        cfg.sigma = sigma;
        cfg.sign = sign;
        cfg.tau = tau;
        cfg.coupling = coupling;
        cfg.long_range = long_range;
        cfg.endpoint_offset = endpoint_offset;
        return to_array(scatter(field_from(u_minus), cfg, plan).coeffs);
      },
      py::arg("plan"), py::arg("u_minus"), py::arg("sigma") = 2.0,
      py::arg("sign") = 1, py::arg("tau") = 1e-2, py::arg("coupling") = 1.0,
      py::arg("long_range") = false, py::arg("endpoint_offset") = 0.0,
      "Scattering map u_- -> u_+ in coefficient space");

  m.def("nu_from_theta", &nu_from_theta, py::arg("j"), py::arg("theta"),
        py::arg("d") = 1,
        "Solitary-profile frequency for a rotation by theta");

  m.def(
      "gen_random_state",
      [](const std::string& kind, int modes, std::uint64_t seed, int d) {
        return to_array(gen_random_state(kind_from(kind), modes, seed, d).coeffs);
      },
      py::arg("kind"), py::arg("modes"), py::arg("seed"), py::arg("d") = 1,
      "Reproducible random coefficient draw (unit_square or lambda_weighted)");
}
