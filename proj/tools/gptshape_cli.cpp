// gptshape: file-based pipeline driver.
//
//   gptshape gpt --shape ellipse:2,1 --d 2 --out m.json
//   gptshape recover --gpt m.json --out g.json
//   gptshape match --ref ref.json --obs g.json
//   gptshape render --poly g.json --svg g.svg
//
// Exit codes: 0 ok, 1 configuration, 2 numerical, 3 io, 4 no match.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gptshape/error.hpp"
#include "gptshape/geometry.hpp"
#include "gptshape/gpt.hpp"
#include "gptshape/io.hpp"
#include "gptshape/npo.hpp"
#include "gptshape/recovery.hpp"
#include "gptshape/render.hpp"
#include "gptshape/transform.hpp"
#include "gptshape/verify.hpp"

namespace {

using namespace gptshape;

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoMatch = 4;

int exit_code(ErrorCode c) {
  switch (category(c)) {
  case ErrorCategory::Config: return kExitConfig;
  case ErrorCategory::Numeric: return kExitNumeric;
  case ErrorCategory::Io: return kExitIo;
  }
  return kExitConfig;
}

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << j.dump(2) << "\n";
  else
    write_json(path, j);
}

Box parse_box(const std::string& s) {
  const auto v = detail::parse_numbers(s);
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
    throw Error(ErrorCode::InvalidArgument, "box must be xmin,xmax,ymin,ymax with xmin<xmax and ymin<ymax");
  return {v[0], v[1], v[2], v[3]};
}

// -- gpt -----------------------------------------------------------------------

struct GptArgs {
  std::string shape = "disk";
  std::string shape_file;
  int n = 256;
  std::optional<double> lambda;
  std::optional<double> k;
  double lambda_imag = 0.0;
  int d = -1;
  int row_degree = -1;
  double grade = 3.0;
  int grid = 512;
  std::string box;
  std::string out;
  std::string dump_npo;
  std::string boundary_csv;
};

ShapeSpec shape_of(const GptArgs& a) {
  return a.shape_file.empty() ? shape_from_string(a.shape) : shape_from_json(read_json(a.shape_file));
}

DiscretizeOptions discretize_options(int n, double grade, int grid, const std::string& box) {
  DiscretizeOptions o;
  o.n = n;
  o.grading = grade;
  o.grid = grid;
  if (!box.empty()) o.box = parse_box(box);
  return o;
}

int cmd_gpt(const GptArgs& a) {
  if (a.lambda && a.k) throw Error(ErrorCode::InvalidArgument, "give either --lambda or --k, not both");
  double lambda = 1.5;
  if (a.lambda) lambda = *a.lambda;
  if (a.k) lambda = lambda_of_k(*a.k).lambda;
  if (a.d < 1) throw Error(ErrorCode::InvalidArgument, "--d must be at least 1");
  if (std::abs(std::complex<double>(lambda, a.lambda_imag)) <= 0.5)
    throw Error(ErrorCode::OutsideResolventBound, "|lambda| must exceed 1/2");

  const ShapeSpec spec = shape_of(a);
  const DiscretizeOptions opts = discretize_options(a.n, a.grade, a.grid, a.box);
  const DiscretizedBoundary b = discretize(spec, opts);
  for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
  if (!a.boundary_csv.empty()) write_text(a.boundary_csv, boundary_csv(b));
  const NpoMatrix npo = assemble_npo(b);
  if (!a.dump_npo.empty()) dump_npo(npo, a.dump_npo);

  json j;
  if (a.lambda_imag != 0.0)
    j = to_json(assemble_gpt<std::complex<double>>(b, npo, {lambda, a.lambda_imag}, a.d, a.row_degree));
  else
    j = to_json(assemble_gpt<double>(b, npo, lambda, a.d, a.row_degree));
  j["meta"] = {{"shape", to_json(spec)},
               {"n", a.n},
               {"nodes", b.size()},
               {"components", b.components()},
               {"grade", a.grade},
               {"grid", a.grid},
               {"box", to_json(opts.box)},
               {"version", kToolVersion}};
  emit(j, a.out);
  return 0;
}

// -- recover / scan-degrees ------------------------------------------------------

struct RecoverArgs {
  std::string gpt;
  std::string out;
  std::optional<double> cross_lambda;
  bool scan = false;
  bool force = false;
  bool minimal_degree = false;
};

json scan_json(const std::vector<DegreeScanRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back({{"d", r.d}, {"residual", r.residual}, {"kernel_gap", r.kernel_gap}});
  return arr;
}

void print_scan(const std::vector<DegreeScanRow>& rows) {
  std::fprintf(stderr, "%4s  %12s  %12s\n", "d", "residual", "kernel_gap");
  for (const auto& r : rows) std::fprintf(stderr, "%4d  %12.3e  %12.3e\n", r.d, r.residual, r.kernel_gap);
}

DiscretizedBoundary boundary_from_meta(const json& gj) {
  if (!gj.contains("meta") || !gj["meta"].contains("shape"))
    throw Error(ErrorCode::InvalidArgument, "--cross-lambda needs a GPT file written by `gptshape gpt` (shape metadata)");
  const json& m = gj["meta"];
  DiscretizeOptions o;
  o.n = m.value("n", 256);
  o.grading = m.value("grade", 3.0);
  o.grid = m.value("grid", 512);
  if (m.contains("box")) o.box = box_from_json(m["box"]);
  return discretize(shape_from_json(m["shape"]), o);
}

template <class Scalar>
RecoveryResult recover_file(const GptMatrix<Scalar>& m, const RecoverArgs& a, const json& gj) {
  RecoverOptions opts;
  opts.minimal_degree = a.minimal_degree;
  if (!a.cross_lambda) return recover(m, opts);
  if constexpr (!std::is_same_v<Scalar, double>) {
    throw Error(ErrorCode::InvalidArgument, "--cross-lambda supports real lambda only");
  } else {
    return recover_crossvalidated(boundary_from_meta(gj), m.d, m.lambda, *a.cross_lambda);
  }
}

int cmd_recover(const RecoverArgs& a) {
  const json gj = read_json(a.gpt);
  RecoveryResult r;
  std::vector<DegreeScanRow> scan;
  if (gpt_json_is_complex(gj)) {
    const auto m = gpt_from_json<std::complex<double>>(gj);
    r = recover_file(m, a, gj);
    if (a.scan) scan = scan_degrees(m);
  } else {
    const auto m = gpt_from_json<double>(gj);
    r = recover_file(m, a, gj);
    if (a.scan) scan = scan_degrees(m);
  }
  json j = to_json(r);
  j["meta"] = {{"source", a.gpt}, {"version", kToolVersion}, {"minimal_degree", a.minimal_degree}};
  if (gj.contains("meta")) j["meta"]["gpt"] = gj["meta"];
  if (a.cross_lambda) j["meta"]["cross_lambda"] = *a.cross_lambda;
  if (a.scan) {
    j["degree_scan"] = scan_json(scan);
    print_scan(scan);
  }
  std::fprintf(stderr, "kernel_gap %.3e  residual %.3e  kernel_dimension %d\n", r.kernel_gap, r.residual,
               r.kernel_dimension);
  const bool ambiguous = r.has_flag("AmbiguousKernel") && !r.has_flag("KernelReduced");
  if (ambiguous && !a.force) {
    std::fprintf(stderr,
                 "AmbiguousKernel: kernel_gap %.3e exceeds %.1f; the degree may be wrong or lambda may sit near an "
                 "exceptional value. Try --scan-degrees, --minimal-degree, or --force to write the result anyway.\n",
                 r.kernel_gap, kAmbiguousGap);
    return kExitNumeric;
  }
  emit(j, a.out);
  return 0;
}

struct ScanArgs {
  std::string gpt;
  int dmax = -1;
  std::string out;
};

int cmd_scan(const ScanArgs& a) {
  const json gj = read_json(a.gpt);
  std::vector<DegreeScanRow> rows;
  if (gpt_json_is_complex(gj))
    rows = scan_degrees(gpt_from_json<std::complex<double>>(gj), a.dmax);
  else
    rows = scan_degrees(gpt_from_json<double>(gj), a.dmax);
  print_scan(rows);
  emit({{"schema", kSchemaVersion}, {"degree_scan", scan_json(rows)}, {"version", kToolVersion}}, a.out);
  return 0;
}

// -- match -----------------------------------------------------------------------

struct MatchArgs {
  std::string ref;
  std::string obs;
  double threshold = 0.01;
  std::string out;
  bool allow_reflection = false;
};

int cmd_match(const MatchArgs& a) {
  MatchOptions o;
  o.allow_reflection = a.allow_reflection;
  const MatchResult m = match(poly_from_any_json(read_json(a.ref)), poly_from_any_json(read_json(a.obs)), o);
  json j = to_json(m);
  j["threshold"] = a.threshold;
  j["matched"] = m.epsilon_match <= a.threshold;
  j["meta"] = {{"ref", a.ref}, {"obs", a.obs}, {"allow_reflection", a.allow_reflection}, {"version", kToolVersion}};
  emit(j, a.out);
  std::fprintf(stderr, "s %.6f  theta %.6f  sign %+d  epsilon_match %.3e  (%zu alternates)\n", m.best.s, m.best.theta,
               m.sign, m.epsilon_match, m.alternates.size());
  if (m.epsilon_match > a.threshold) {
    std::fprintf(stderr, "no match: epsilon_match %.3e > threshold %.3e\n", m.epsilon_match, a.threshold);
    return kExitNoMatch;
  }
  return 0;
}

// -- render ----------------------------------------------------------------------

struct RenderArgs {
  std::string poly;
  std::string box = "-4,4,-4,4";
  int grid = 512;
  double level = 0.0;
  std::string svg;
  std::string csv;
  std::string overlay;
  std::string overlay_file;
  int overlay_n = 256;
};

int cmd_render(const RenderArgs& a) {
  const Poly2 p = poly_from_any_json(read_json(a.poly));
  const Box box = parse_box(a.box);
  const LevelSetCurves curves = extract(p, box, a.grid, a.level);
  std::optional<SvgOverlay> overlay;
  if (!a.overlay.empty() || !a.overlay_file.empty()) {
    const ShapeSpec spec = a.overlay_file.empty() ? shape_from_string(a.overlay) : shape_from_json(read_json(a.overlay_file));
    DiscretizeOptions o;
    o.n = a.overlay_n;
    o.box = box;
    overlay = overlay_from(discretize(spec, o));
  }
  if (!a.svg.empty()) export_svg(curves, overlay, a.svg);
  if (!a.csv.empty()) write_text(a.csv, to_csv(curves));
  int unbounded = 0;
  for (const auto& pl : curves.polylines) unbounded += pl.unbounded ? 1 : 0;
  std::printf("polylines %zu  closed %d  unbounded %d  boundedness %s\n", curves.polylines.size(),
              curves.closed_count(), unbounded, to_string(boundedness_check(p)));
  return 0;
}

// -- verify ----------------------------------------------------------------------

int cmd_verify(bool quick, bool corrupt_diagonal) {
  VerifyOptions o;
  o.quick = quick;
  if (corrupt_diagonal) o.diagonal = DiagonalRule::Zero;
  const auto checks = run_verify(o);
  int failures = 0;
  for (const auto& c : checks) {
    std::printf("%-4s  %-48s  err %.3e  tol %.1e  %.3fs%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.error,
                c.tolerance, c.seconds, c.note.empty() ? "" : "  ", c.note.c_str());
    failures += c.passed ? 0 : 1;
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failures);
  return failures == 0 ? 0 : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized polarization tensors and algebraic shape recovery"};
  app.set_version_flag("--version", std::string(gptshape::kToolVersion));
  app.require_subcommand(1);

  GptArgs ga;
  auto* gpt = app.add_subcommand("gpt", "Discretize a shape and write its GPT matrix as JSON");
  gpt->add_option("--shape", ga.shape,
                  "disk[:r] | ellipse:a,b[,tilt] | flower[:R,A,m] | flower-missing[:R,A,m] | triangle[:side] | "
                  "diamond[:h] | square[:side] | lemniscate[:r[,pole_x]]")
      ->capture_default_str();
  gpt->add_option("--shape-file", ga.shape_file, "Shape JSON (overrides --shape)");
  gpt->add_option("--n", ga.n, "Nodes per component, or per edge for polygons")->capture_default_str();
  gpt->add_option("--lambda", ga.lambda, "Contrast parameter, |lambda| > 1/2 (default 1.5)");
  gpt->add_option("--k", ga.k, "Conductivity; sets lambda = (k+1)/(2(k-1))");
  gpt->add_option("--lambda-imag", ga.lambda_imag, "Imaginary part of lambda (complex assembly)");
  gpt->add_option("--d", ga.d, "Column degree d (rows run to 2d)")->required();
  gpt->add_option("--row-degree", ga.row_degree, "Row degree bound (default 2d)");
  gpt->add_option("--grade", ga.grade, "Polygon corner grading exponent")->capture_default_str();
  gpt->add_option("--grid", ga.grid, "Tracing grid for implicit shapes")->capture_default_str();
  gpt->add_option("--box", ga.box, "Tracing box xmin,xmax,ymin,ymax (default -4,4,-4,4)");
  gpt->add_option("--out", ga.out, "Output file (default stdout)");
  gpt->add_option("--dump-npo", ga.dump_npo, "Also write the raw NPO matrix (binary)");
  gpt->add_option("--boundary-csv", ga.boundary_csv, "Also write the discretized boundary as CSV");

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "Recover the boundary polynomial from a GPT matrix");
  rec->add_option("--gpt", ra.gpt, "GPT matrix JSON")->required();
  rec->add_option("--out", ra.out, "Output file (default stdout)");
  rec->add_option("--cross-lambda", ra.cross_lambda, "Second lambda for cross-validation (rebuilds the boundary)");
  rec->add_flag("--scan-degrees", ra.scan, "Also report residual and kernel gap for every d' <= d");
  rec->add_flag("--force", ra.force, "Write the result even when the kernel is ambiguous");
  rec->add_flag("--minimal-degree", ra.minimal_degree,
                "If the numerical kernel is multi-dimensional, return its lowest-degree element");

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan-degrees", "Residual and kernel gap for d = 1..dmax");
  scan->add_option("--gpt", sa.gpt, "GPT matrix JSON")->required();
  scan->add_option("--dmax", sa.dmax, "Largest degree (default: the file's d)");
  scan->add_option("--out", sa.out, "Output file (default stdout)");

  MatchArgs ma;
  auto* mat = app.add_subcommand("match", "Estimate the rotation and scale taking a reference polynomial to an observed one");
  mat->add_option("--ref", ma.ref, "Reference polynomial (Poly2 or recovery JSON)")->required();
  mat->add_option("--obs", ma.obs, "Observed polynomial (Poly2 or recovery JSON)")->required();
  mat->add_option("--threshold", ma.threshold, "Largest epsilon_match counted as a match")->capture_default_str();
  mat->add_option("--out", ma.out, "Output file (default stdout)");
  mat->add_flag("--allow-reflection", ma.allow_reflection, "Also search reflected transforms");

  RenderArgs rn;
  auto* ren = app.add_subcommand("render", "Extract a level set of a polynomial to SVG/CSV");
  ren->add_option("--poly", rn.poly, "Poly2 or recovery JSON")->required();
  ren->add_option("--box", rn.box, "xmin,xmax,ymin,ymax")->capture_default_str();
  ren->add_option("--grid", rn.grid, "Grid cells per side (>= 32)")->capture_default_str();
  ren->add_option("--level", rn.level, "Level value c in {p = c}")->capture_default_str();
  ren->add_option("--svg", rn.svg, "SVG output path");
  ren->add_option("--csv", rn.csv, "CSV output path");
  ren->add_option("--overlay", rn.overlay, "Source shape drawn underneath (same syntax as gpt --shape)");
  ren->add_option("--overlay-file", rn.overlay_file, "Source shape JSON drawn underneath");
  ren->add_option("--overlay-n", rn.overlay_n, "Overlay nodes per component")->capture_default_str();

  bool quick = false, corrupt = false;
  auto* ver = app.add_subcommand("verify", "Run the built-in oracle suite");
  ver->add_flag("--quick", quick, "Fast subset");
  ver->add_flag("--corrupt-diagonal", corrupt, "Test hook: zero the NPO diagonal")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gpt) return cmd_gpt(ga);
    if (*rec) return cmd_recover(ra);
    if (*scan) return cmd_scan(sa);
    if (*mat) return cmd_match(ma);
    if (*ren) return cmd_render(rn);
    if (*ver) return cmd_verify(quick, corrupt);
  } catch (const gptshape::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
