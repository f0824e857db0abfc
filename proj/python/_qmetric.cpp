#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmetric/approxdim.hpp"
#include "qmetric/entropy.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/experiments.hpp"
#include "qmetric/metricspace.hpp"
#include "qmetric/nctorus.hpp"
#include "qmetric/weyl.hpp"

namespace py = pybind11;
using namespace qmetric;
using linalg::CMatrix;
using linalg::Complex;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

namespace {

ComplexArray to_array(const CMatrix& m) {
  ComplexArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

CMatrix from_array(const ComplexArray& a) {
  if (a.ndim() != 2) throw PreconditionError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return CMatrix(rows, cols, std::vector<Complex>(a.data(), a.data() + rows * cols));
}

nctorus::TwistedPolynomial polynomial(const nctorus::PhaseMatrix& phase, const std::map<nctorus::Exponent, Complex>& terms) {
  return nctorus::TwistedPolynomial(phase, terms);
}

py::object json_to_py(const experiments::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

experiments::Json py_to_json(const py::object& o) {
  if (py::isinstance<py::str>(o)) return experiments::Json::parse(o.cast<std::string>());
  return experiments::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_qmetric, m) {
  m.doc() = "Quantum metric dimension and product entropy experiments";

  static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
  static py::exception<ResourceLimitError> resource(m, "ResourceLimitError", PyExc_RuntimeError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const ResourceLimitError& e) {
      py::set_error(resource, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    }
  });

  m.def("run_experiment", [](const py::object& config) {
    const auto r = experiments::run(py_to_json(config));
    py::dict out;
    out["command"] = r.command;
    out["config"] = json_to_py(r.config);
    out["columns"] = r.table.columns;
    py::list rows;
    for (const auto& row : r.table.rows) {
      py::list pr;
      for (const auto& c : row) pr.append(json_to_py(c));
      rows.append(pr);
    }
    out["rows"] = rows;
    out["summary"] = json_to_py(r.summary);
    out["csv"] = experiments::to_csv(r);
    return out;
  }, py::arg("config"));
  m.def("commands", &experiments::commands);

  // weyl
  m.def("clock_shift", [](int p) {
    const auto cs = weyl::clock_shift(p);
    return py::make_tuple(to_array(cs.u), to_array(cs.v));
  }, py::arg("p"));
  m.def("weyl_monomial", [](int p, int lo, int hi, const std::vector<weyl::SiteExponent>& ex) {
    return to_array(weyl::weyl_monomial({p, lo, hi}, ex).matrix());
  }, py::arg("p"), py::arg("lo"), py::arg("hi"), py::arg("exponents"));
  m.def("weyl_coefficients", [](const ComplexArray& a, int p, int lo, int hi) {
    const weyl::WeylElement e({p, lo, hi}, from_array(a));
    const auto v = e.coefficients().values();
    return std::vector<Complex>(v.begin(), v.end());
  }, py::arg("matrix"), py::arg("p"), py::arg("lo"), py::arg("hi"));
  m.def("weyl_lip_norm", [](const ComplexArray& a, int p, int lo, int hi, double lambda) {
    return weyl::weyl_lip_norm(weyl::WeylElement({p, lo, hi}, from_array(a)), lambda);
  }, py::arg("matrix"), py::arg("p"), py::arg("lo"), py::arg("hi"), py::arg("lam"));

  m.def("shift_lipschitz_number", [](int p, double lam, int by, int n) {
    return weyl::shift_lipschitz_number(p, lam, by, n);
  }, py::arg("p"), py::arg("lam"), py::arg("by"), py::arg("n"));

  // nctorus
  m.def("twisted_product", [](const std::vector<std::vector<double>>& theta,
                              const std::map<nctorus::Exponent, Complex>& a,
                              const std::map<nctorus::Exponent, Complex>& b) {
    const auto phase = nctorus::PhaseMatrix::from_matrix(theta);
    py::dict out;
    const auto product = nctorus::twisted_product(polynomial(phase, a), polynomial(phase, b));
    for (const auto& [k, c] : product.terms())
      out[py::tuple(py::cast(k))] = c;
    return out;
  }, py::arg("theta"), py::arg("a"), py::arg("b"));
  m.def("torus_lip_bounds", [](const std::vector<std::vector<double>>& theta,
                               const std::map<nctorus::Exponent, Complex>& a) {
    const auto b = nctorus::lip_bounds(polynomial(nctorus::PhaseMatrix::from_matrix(theta), a));
    return py::make_tuple(b.lower, b.upper);
  }, py::arg("theta"), py::arg("a"));
  m.def("fejer_eval", &nctorus::fejer_eval, py::arg("n"), py::arg("t"));
  m.def("fejer_abs_moment", &nctorus::fejer_abs_moment, py::arg("n"));

  // approxdim
  m.def("dim_lower_spectral", [](const ComplexArray& a, double delta) {
    return approx::dim_lower_spectral(approx::VectorFamily(from_array(a)), delta);
  }, py::arg("vectors"), py::arg("delta"));
  m.def("dim_upper_svd", [](const ComplexArray& a, double delta) {
    const auto w = approx::dim_upper_svd(approx::VectorFamily(from_array(a)), delta);
    return py::make_tuple(w.dim, to_array(w.basis), w.max_residual);
  }, py::arg("vectors"), py::arg("delta"));
  m.def("dim_exact_orthonormal", [](std::size_t n, double delta) { return approx::dim_exact_orthonormal(n, delta); },
        py::arg("m"), py::arg("delta"));

  // metricspace
  m.def("net_statistics", [](const std::vector<std::vector<double>>& points, double delta) {
    const auto s = metric::net_statistics(metric::FiniteMetricSpace::from_points(points), delta);
    py::dict d;
    d["sep"] = s.sep;
    d["spn"] = s.spn;
    d["cover"] = s.cover;
    d["exact"] = s.sep_exact;
    return d;
  }, py::arg("points"), py::arg("delta"));
  m.def("box_dimension", [](const std::vector<std::vector<double>>& points, const std::vector<double>& grid) {
    return metric::box_dimension(metric::FiniteMetricSpace::from_points(points), grid).slope_sep;
  }, py::arg("points"), py::arg("delta_grid"));

  // entropy
  m.def("lattice_orbit_card", [](const entropy::IntMatrix& T, int mm, int n) {
    return entropy::lattice_orbit_card(T, mm, n).counts;
  }, py::arg("T"), py::arg("m"), py::arg("n"));
  m.def("eigen_entropy", &entropy::eigen_entropy, py::arg("T"));
  m.def("box_bound_card", [](const entropy::IntMatrix& T, int mm, int n, double pad) {
    return entropy::box_bound_card(T, mm, n, pad).bounds;
  }, py::arg("T"), py::arg("m"), py::arg("n"), py::arg("pad"));
  m.def("shift_entropy_bracket", [](int p, int n, double delta) {
    const auto b = entropy::shift_entropy_bracket(p, n, delta);
    return py::make_tuple(b.lower, b.upper);
  }, py::arg("p"), py::arg("n"), py::arg("delta"));
}
