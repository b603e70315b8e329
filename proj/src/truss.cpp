#include "lsk/truss.hpp"

#include "lsk/parallel.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lsk {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

json truss_to_json(const TrussModel& truss) {
  json joints = json::array();
  for (const Joint& j : truss.joints) {
    json o{{"x", {j.x.x(), j.x.y(), j.x.z()}}, {"on_surface", j.on_surface}};
    if (j.on_surface) {
      o["theta"] = {j.theta(0), j.theta(1)};
      o["patch"] = j.patch;
    }
    joints.push_back(o);
  }
  json struts = json::array();
  for (const Strut& s : truss.struts) struts.push_back({s.a, s.b, s.area});
  return json{{"schema", 1}, {"joints", joints}, {"struts", struts}};
}

TrussModel truss_from_json(const json& doc) {
  TrussModel t;
  try {
    for (const json& j : doc.at("joints")) {
      Joint jt;
      jt.x = vec3(j.at("x"));
      jt.on_surface = j.value("on_surface", false);
      if (j.contains("theta")) jt.theta = Vec2(j["theta"][0].get<double>(), j["theta"][1].get<double>());
      jt.patch = j.value("patch", -1);
      t.joints.push_back(jt);
    }
    const int n = static_cast<int>(t.joints.size());
    for (const json& s : doc.at("struts")) {
      if (!s.is_array() || s.size() != 3) throw InputError("strut must be [j1, j2, area]");
      Strut st{s[0].get<int>(), s[1].get<int>(), s[2].get<double>()};
      if (st.a < 0 || st.b < 0 || st.a >= n || st.b >= n || st.a == st.b)
        throw InputError("strut references an invalid joint");
      if (!(st.area > 0.0)) throw InputError("strut area must be positive");
      t.struts.push_back(st);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("truss document: ") + e.what());
  }
  return t;
}

double strut_strain(const Vec3& uL, const Vec3& uR, const Vec3& t, double l) {
  if (!(l > 0.0)) throw std::invalid_argument("strut length must be positive");
  if (std::abs(t.norm() - 1.0) > 1e-12) throw std::invalid_argument("tangent must be a unit vector");
  return (uL - uR).dot(t) / l;
}

Eigen::SparseMatrix<double> assemble_stiffness(const TrussModel& truss, double E, int threads) {
  using Triplet = Eigen::Triplet<double>;
  const std::size_t ns = truss.struts.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(ns, 64));
  const std::size_t per = (ns + chunks - 1) / std::max<std::size_t>(chunks, 1);
  std::vector<std::vector<Triplet>> parts(chunks);

  parallel_for(chunks, threads, [&](std::size_t c) {
    auto& out = parts[c];
    for (std::size_t k = c * per; k < std::min(ns, (c + 1) * per); ++k) {
      const Strut& s = truss.struts[k];
      const double l = truss.length(s);
      if (!(l > 0.0)) throw std::invalid_argument("zero-length strut");
      const Vec3 t = truss.tangent(s);
      const Eigen::Matrix3d tt = t * t.transpose();
      const Eigen::Matrix3d ke = (E * s.area / l) * tt;
      const std::array<int, 2> J{s.a, s.b};
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          const double sign = p == q ? 1.0 : -1.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              out.emplace_back(3 * J[p] + i, 3 * J[q] + j, sign * ke(i, j));
        }
    }
  });

  std::vector<Triplet> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  const Eigen::Index n = 3 * static_cast<Eigen::Index>(truss.joints.size());
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(all.begin(), all.end());
  return K;
}

TrussSolution assemble_and_solve(const TrussProblem& p, int threads) {
  const TrussModel& t = p.truss;
  const int nj = static_cast<int>(t.joints.size());
  if (!(p.youngs_modulus > 0.0)) throw InputError("Young's modulus must be positive");
  const Eigen::Index n = 3 * nj;

  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  for (const auto& [j, c] : p.fixed_dofs) {
    if (j < 0 || j >= nj || c < 0 || c > 2) throw InputError("invalid fixed dof");
    fixed[3 * j + c] = true;
  }
  Vector f = Vector::Zero(n);
  for (const auto& [j, force] : p.point_loads) {
    if (j < 0 || j >= nj) throw InputError("load on an invalid joint");
    f.segment<3>(3 * j) += force;
  }

  const Eigen::SparseMatrix<double> K = assemble_stiffness(t, p.youngs_modulus, threads);

  std::vector<Eigen::Index> free_map(static_cast<std::size_t>(n), -1);
  Eigen::Index nf = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!fixed[i]) free_map[i] = nf++;

  Vector u = Vector::Zero(n);
  if (nf > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < K.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
        const auto r = free_map[it.row()];
        const auto c = free_map[it.col()];
        if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
      }
    Eigen::SparseMatrix<double> Kf(nf, nf);
    Kf.setFromTriplets(trip.begin(), trip.end());
    Vector ff(nf);
    for (Eigen::Index i = 0; i < n; ++i)
      if (free_map[i] >= 0) ff(free_map[i]) = f(i);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kf);
    const Vector D = ldlt.info() == Eigen::Success ? Vector(ldlt.vectorD()) : Vector();
    bool singular = D.size() == 0;
    if (!singular) {
      const double dmax = D.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < D.size(); ++i) singular = singular || D(i) <= 1e-10 * dmax;
    }
    if (singular) {
      Kf.makeCompressed();
      Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
      double kmax = 0.0;
      for (Eigen::Index i = 0; i < Kf.nonZeros(); ++i) kmax = std::max(kmax, std::abs(Kf.valuePtr()[i]));
      qr.setPivotThreshold(1e-10 * kmax);
      qr.compute(Kf);
      const int modes = std::max(1, static_cast<int>(nf - qr.rank()));
      std::ostringstream msg;
      msg << "truss is a mechanism: " << modes << " zero-energy mode(s)";
      throw MechanismError(msg.str(), modes);
    }
    const Vector uf = ldlt.solve(ff);
    for (Eigen::Index i = 0; i < n; ++i)
      if (free_map[i] >= 0) u(i) = uf(free_map[i]);
  }

  TrussSolution s;
  s.displacements.resize(static_cast<std::size_t>(nj));
  for (int j = 0; j < nj; ++j) s.displacements[j] = u.segment<3>(3 * j);
  for (const Strut& st : t.struts)
    s.strains.push_back(strut_strain(s.displacements[st.a], s.displacements[st.b], t.tangent(st),
                                     t.length(st)));
  const Vector r = K * u - f;
  s.reactions.assign(static_cast<std::size_t>(nj), Vec3::Zero());
  for (int j = 0; j < nj; ++j)
    for (int c = 0; c < 3; ++c)
      if (fixed[3 * j + c]) s.reactions[j](c) = r(3 * j + c);
  s.compliance = f.dot(u);
  return s;
}

TrussProblem problem_from_json(TrussModel truss, const json& bc) {
  TrussProblem p;
  p.truss = std::move(truss);
  try {
    p.youngs_modulus = bc.at("youngs_modulus").get<double>();
    if (bc.contains("fixed"))
      for (const json& f : bc["fixed"]) {
        const int j = f.at("joint").get<int>();
        const auto dofs = f.value("dofs", std::vector<int>{0, 1, 2});
        for (int c : dofs) p.fixed_dofs.emplace_back(j, c);
      }
    if (bc.contains("loads"))
      for (const json& l : bc["loads"]) {
        const int j = l.at("joint").get<int>();
        const Vec3 force = vec3(l.at("force"));
        auto [it, inserted] = p.point_loads.emplace(j, force);
        if (!inserted) it->second += force;
      }
  } catch (const json::exception& e) {
    throw InputError(std::string("boundary-condition document: ") + e.what());
  }
  return p;
}

json solution_to_json(const TrussSolution& s) {
  json disp = json::array();
  for (const Vec3& u : s.displacements) disp.push_back({u.x(), u.y(), u.z()});
  json reac = json::array();
  for (const Vec3& r : s.reactions) reac.push_back({r.x(), r.y(), r.z()});
  return json{{"schema", 1},
              {"displacements", disp},
              {"strains", s.strains},
              {"reactions", reac},
              {"compliance", s.compliance}};
}

}  // namespace lsk
