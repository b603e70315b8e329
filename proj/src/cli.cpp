#include "lsk/cli.hpp"

#include "lsk/bvh.hpp"
#include "lsk/fixtures.hpp"
#include "lsk/lattice.hpp"
#include "lsk/parallel.hpp"
#include "lsk/patch_io.hpp"
#include "lsk/subdivision.hpp"
#include "lsk/truss.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lsk {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Vec3 parse_point(const std::string& s) {
  std::stringstream in(s);
  std::string tok;
  std::vector<double> v;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("cannot parse coordinate '" + tok + "'");
    }
  }
  if (v.size() != 3) throw InputError("expected x,y,z but got '" + s + "'");
  return Vec3(v[0], v[1], v[2]);
}

std::vector<Vec3> parse_points(const std::string& s) {
  std::stringstream in(s);
  std::string tok;
  std::vector<Vec3> out;
  while (in >> tok) out.push_back(parse_point(tok));
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::stringstream in(s);
  std::string tok;
  std::vector<double> out;
  while (std::getline(in, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

json record_json(const IntersectionRecord& r) {
  return json{{"xi", r.xi},
              {"theta", {r.theta(0), r.theta(1)}},
              {"point", {r.point.x(), r.point.y(), r.point.z()}},
              {"patch_id", r.patch_id},
              {"multiplicity_hint", r.multiplicity_hint},
              {"self_intersection", r.self_intersection}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

struct Globals {
  int threads = default_threads();
  unsigned long long seed = 42;
};

struct IntersectArgs {
  std::string patches, line, quadratic, method = "mrep", out;
  double tol = 1e-8;
  double ftol = 1e-9;
};

int cmd_intersect(const IntersectArgs& a, const Globals& g) {
  const auto patches = read_patch_set(a.patches);
  if (patches.empty()) throw InputError("patch set is empty");
  if (a.method != "mrep" && a.method != "subdivision")
    throw InputError("--method must be mrep or subdivision");
  if (a.line.empty() == a.quadratic.empty())
    throw InputError("give exactly one of --line and --quadratic");

  IntersectOptions opt;
  opt.domain_tol = a.tol;
  std::vector<std::vector<IntersectionRecord>> per(patches.size());
  const auto t0 = Clock::now();

  if (!a.line.empty()) {
    const auto pts = parse_points(a.line);
    if (pts.size() != 2) throw InputError("--line needs two points");
    if ((pts[1] - pts[0]).norm() == 0.0) throw InputError("--line endpoints coincide");
    const ParametricLine line = ParametricLine::through(pts[0], pts[1]);
    const Bvh bvh = build_bvh(patches, DirectionSet::fourteen(surface_average_normal(patches),
                                                              Eigen::Matrix3d::Identity()));
    const auto cand = query_segment(bvh, pts[0], pts[1]);
    parallel_for(cand.size(), g.threads, [&](std::size_t k) {
      const int id = cand[k];
      if (a.method == "mrep")
        per[id] = intersect_patch_line(patches[id], line, opt, id);
      else
        per[id] = subdivision_intersect(patches[id], line, FlatnessTolerance(a.ftol), nullptr, id);
    });
  } else {
    if (a.method != "mrep") throw InputError("--quadratic requires --method mrep");
    const auto c = parse_points(a.quadratic);
    if (c.size() != 3) throw InputError("--quadratic needs c0 c1 c2");
    const ParametricQuadratic q(c[0], c[1], c[2]);
    parallel_for(patches.size(), g.threads, [&](std::size_t id) {
      per[id] = intersect_patch_quadratic(patches[id], build_mrep(patches[id]), q, opt,
                                          static_cast<int>(id));
    });
  }

  std::vector<IntersectionRecord> all;
  for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
  double scale = 0.0;
  for (const auto& p : patches) scale = std::max(scale, p.diameter());
  all = dedup_records(std::move(all), a.method == "mrep" ? opt.dedup_tol : a.ftol,
                      a.method == "mrep" ? 1e-9 * scale : a.ftol);

  json recs = json::array();
  for (const auto& r : all) recs.push_back(record_json(r));
  const json report{{"schema", 1},
                    {"method", a.method},
                    {"count", all.size()},
                    {"time_ms", ms_since(t0)},
                    {"records", recs}};
  emit(a.out, report.dump(2) + "\n");
  return 0;
}

struct LatticeArgs {
  std::string patches, lattice, cell_type, out, report;
  double area = 1e-4;
  int dops = 14;
};

int cmd_lattice(const LatticeArgs& a, const Globals& g) {
  const auto patches = read_patch_set(a.patches);
  if (patches.empty()) throw InputError("patch set is empty");
  LatticeSpec spec = lattice_spec_from_json(read_json_file(a.lattice));
  if (!a.cell_type.empty()) spec.cell_type = parse_cell_type(a.cell_type);
  if (a.dops != 6 && a.dops != 14) throw InputError("--dops must be 6 or 14");
  check_containment(spec, patches);

  std::vector<std::pair<std::string, double>> phases;
  auto t = Clock::now();
  const DirectionSet dirs =
      a.dops == 14 ? lattice_directions(spec, patches) : DirectionSet::axis_aligned();
  const Bvh bvh = build_bvh(patches, dirs);
  phases.emplace_back("bvh", ms_since(t));

  t = Clock::now();
  const auto mreps = build_mreps(patches, g.threads);
  phases.emplace_back("implicitise", ms_since(t));

  t = Clock::now();
  LatticeModel model = generate_lattice(spec);
  LatticeIntersectOptions lo;
  lo.threads = g.threads;
  compute_intersections(model, bvh, patches, mreps, lo);
  phases.emplace_back("intersect", ms_since(t));

  t = Clock::now();
  classify_and_project(model, 1e-9 * spec.cell_size);
  phases.emplace_back("classify_project", ms_since(t));

  t = Clock::now();
  const TrussModel truss = build_truss(model, spec.cell_type, a.area);
  phases.emplace_back("truss", ms_since(t));

  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& w : truss.warnings) std::cerr << "warning: " << w << "\n";

  if (!a.out.empty()) write_json_file(a.out, truss_to_json(truss));

  int interior = 0, projected = 0, hits = 0, candidates = 0;
  for (const auto& v : model.vertices) {
    interior += v.inside ? 1 : 0;
    projected += v.state == VertexState::PROJECTED ? 1 : 0;
  }
  for (const auto& l : model.lines) {
    hits += static_cast<int>(l.hits.size());
    candidates += l.candidates;
  }

  std::ostringstream csv;
  csv << "schema,kind,id,direction,candidates,hits,parity,reliable,interior_vertices,"
         "projected_vertices,time_ms\n";
  double total = 0.0;
  for (const auto& [name, ms] : phases) total += ms;
  csv << "1,summary,all,,"<< candidates << ',' << hits << ',' << (hits % 2 ? "odd" : "even")
      << ",," << interior << ',' << projected << ',' << total << '\n';
  for (const auto& [name, ms] : phases) csv << "1,phase," << name << ",,,,,,,," << ms << '\n';
  for (std::size_t i = 0; i < model.lines.size(); ++i) {
    const auto& l = model.lines[i];
    csv << "1,line," << i << ',' << l.direction << ',' << l.candidates << ',' << l.hits.size()
        << ',' << (l.hits.size() % 2 ? "odd" : "even") << ',' << (l.reliable ? 1 : 0) << ",,,\n";
  }
  if (!a.report.empty()) emit(a.report, csv.str());

  std::cout << "joints " << truss.joints.size() << ", struts " << truss.struts.size()
            << ", hits " << hits << ", interior vertices " << interior << "\n";
  return 0;
}

struct SolveArgs {
  std::string truss, bc, out;
};

int cmd_solve(const SolveArgs& a, const Globals& g) {
  TrussModel t = truss_from_json(read_json_file(a.truss));
  const TrussProblem p = problem_from_json(std::move(t), read_json_file(a.bc));
  const TrussSolution s = assemble_and_solve(p, g.threads);
  emit(a.out, solution_to_json(s).dump(2) + "\n");
  if (!a.out.empty()) std::cout << "compliance " << s.compliance << "\n";
  return 0;
}

struct BvhArgs {
  std::string patches, out;
  int max_leaf = 4;
  int dops = 14;
};

int cmd_bvh(const BvhArgs& a, const Globals&) {
  const auto patches = read_patch_set(a.patches);
  if (patches.empty()) throw InputError("patch set is empty");
  if (a.dops != 6 && a.dops != 14) throw InputError("--dops must be 6 or 14");
  if (a.max_leaf < 1) throw InputError("--max-leaf must be positive");
  const DirectionSet dirs = a.dops == 14 ? DirectionSet::fourteen(surface_average_normal(patches),
                                                                  Eigen::Matrix3d::Identity())
                                         : DirectionSet::axis_aligned();
  const BvhStats s = bvh_stats(build_bvh(patches, dirs, a.max_leaf));
  std::ostringstream csv;
  csv << "schema,metric,value\n";
  csv << "1,patches," << patches.size() << "\n";
  csv << "1,nodes," << s.nodes << "\n";
  csv << "1,leaves," << s.leaves << "\n";
  csv << "1,depth," << s.depth << "\n";
  for (const auto& [k, count] : s.leaf_occupancy) csv << "1,leaf_occupancy_" << k << ',' << count << "\n";
  emit(a.out, csv.str());
  return 0;
}

struct BenchArgs {
  std::string cases = "random100", ftol = "1e-6,1e-9", out;
};

int cmd_bench(const BenchArgs& a, const Globals& g) {
  if (a.cases.rfind("random", 0) != 0) throw InputError("--cases must look like randomN");
  int n = 0;
  try {
    n = std::stoi(a.cases.substr(6));
  } catch (const std::exception&) {
    throw InputError("--cases must look like randomN");
  }
  if (n < 1) throw InputError("--cases needs N >= 1");
  const auto ftols = parse_list(a.ftol);
  for (double f : ftols)
    if (!(f > 0.0)) throw InputError("flatness tolerances must be positive");

  std::mt19937_64 rng(g.seed);
  std::ostringstream csv;
  csv << "schema,case,method,ftol,time_ms,peak_mem_bytes,hits\n";
  for (int c = 0; c < n; ++c) {
    const TransversalCase tc = random_transversal_case(rng);
    auto t = Clock::now();
    const MRep m = build_mrep(tc.patch);
    const auto r = intersect_patch_line(tc.patch, m, tc.line);
    const double tm = ms_since(t);
    const std::size_t mem = static_cast<std::size_t>(m.gamma.size() + 2 * m.G[0].size()) * sizeof(double);
    csv << "1," << c << ",mrep,," << tm << ',' << mem << ',' << r.size() << '\n';
    for (double f : ftols) {
      SubdivisionStats st;
      t = Clock::now();
      std::string hits;
      try {
        hits = std::to_string(subdivision_intersect(tc.patch, tc.line, FlatnessTolerance(f), &st).size());
      } catch (const ToleranceUnreachable&) {
        hits = "unreachable";
      }
      csv << "1," << c << ",subdivision," << f << ',' << ms_since(t) << ',' << st.peak_bytes << ','
          << hits << '\n';
    }
  }
  emit(a.out, csv.str());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Curve/spline-surface intersection and lattice-skin truss tools"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for random workloads");

  IntersectArgs ia;
  auto* si = app.add_subcommand("intersect", "Intersect a line or quadratic with a patch set");
  si->add_option("--patches", ia.patches, "Patch-set JSON")->required();
  si->add_option("--line", ia.line, "\"x0,y0,z0 x1,y1,z1\"");
  si->add_option("--quadratic", ia.quadratic, "\"c0 c1 c2\" with r = c0 + c1 xi + c2 xi^2");
  si->add_option("--tol", ia.tol, "Domain tolerance");
  si->add_option("--method", ia.method, "mrep or subdivision");
  si->add_option("--ftol", ia.ftol, "Flatness tolerance for subdivision");
  si->add_option("--out", ia.out, "Report JSON (stdout if omitted)");

  LatticeArgs la;
  auto* sl = app.add_subcommand("lattice-gen", "Immerse a lattice in a closed surface and emit a truss");
  sl->add_option("--patches", la.patches, "Patch-set JSON")->required();
  sl->add_option("--lattice", la.lattice, "Lattice JSON")->required();
  sl->add_option("--cell-type", la.cell_type, "bcc, pyramidal or cubic_edges");
  sl->add_option("--area", la.area, "Strut cross-section area");
  sl->add_option("--dops", la.dops, "6 or 14 bounding directions");
  sl->add_option("--out", la.out, "Truss JSON");
  sl->add_option("--report", la.report, "Statistics CSV");

  SolveArgs sa;
  auto* ss = app.add_subcommand("solve-truss", "Linear statics of a pin-jointed truss");
  ss->add_option("--truss", sa.truss, "Truss JSON")->required();
  ss->add_option("--bc", sa.bc, "Boundary-condition JSON")->required();
  ss->add_option("--out", sa.out, "Solution JSON (stdout if omitted)");

  BvhArgs ba;
  auto* sb = app.add_subcommand("bvh-stats", "Print k-dop tree statistics as CSV");
  sb->add_option("--patches", ba.patches, "Patch-set JSON")->required();
  sb->add_option("--max-leaf", ba.max_leaf, "Patches per leaf");
  sb->add_option("--dops", ba.dops, "6 or 14 bounding directions");
  sb->add_option("--out", ba.out, "CSV file (stdout if omitted)");

  BenchArgs bn;
  auto* sn = app.add_subcommand("bench", "Compare mrep and subdivision on random cases");
  sn->add_option("--cases", bn.cases, "randomN");
  sn->add_option("--ftol", bn.ftol, "Comma-separated flatness tolerances");
  sn->add_option("--out", bn.out, "CSV file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*si) return cmd_intersect(ia, g);
    if (*sl) return cmd_lattice(la, g);
    if (*ss) return cmd_solve(sa, g);
    if (*sb) return cmd_bvh(ba, g);
    if (*sn) return cmd_bench(bn, g);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lsk
