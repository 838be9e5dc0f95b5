#include "rivercover/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "rivercover/bathymetry.hpp"
#include "rivercover/current_sim.hpp"
#include "rivercover/errors.hpp"
#include "rivercover/mission_io.hpp"
#include "rivercover/render.hpp"
#include "rivercover/synthetic.hpp"

namespace rivercover {

namespace {

// Every option lives on the top-level app so that one flat config file serves all
// subcommands; a subcommand ignores the keys it does not use.
struct RunConfig {
  std::string subcommand;
  std::string map;
  std::vector<double> start;
  std::vector<double> geo;
  double resolution = 0.0;
  double spacing = 45.0;
  std::string algo = "m-cover";
  std::string algos = "m-cover,width-m-cover,l-cover,t-cover";
  double v_min = 0.2;
  double v_max = 1.0;
  std::string profile = "linear";
  double exponent = 2.0;
  double boat_speed = 2.0;
  double turn_penalty = 0.0;
  double calibrate = 0.0;
  std::string out = ".";
  std::uint64_t seed = 1;
  std::size_t max_waypoints = 700;
  // depthmap
  std::string samples;
  int folds = 5;
  double length_scale = 0.0;
  double signal_var = 0.0;
  double noise_var = 0.0;
  // synth
  std::string shape = "sine";
  double length = 2760.0;
  double width = 90.0;
  double amplitude = 150.0;
  double wavelength = 920.0;
  int depth_samples = 0;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Vec2 parse_pair(const std::vector<double>& v, const char* what) {
  if (v.size() != 2 || !std::isfinite(v[0]) || !std::isfinite(v[1]))
    throw ValidationError(std::string(what) + " must be two finite comma-separated numbers");
  return {v[0], v[1]};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void check_common(const RunConfig& c) {
  require(std::isfinite(c.spacing) && c.spacing > 0, "--spacing must be > 0 metres");
  require(std::isfinite(c.resolution) && c.resolution >= 0, "--resolution must be >= 0 (0 keeps the map's own)");
  require(std::isfinite(c.boat_speed) && c.boat_speed > 0, "--boat-speed must be > 0");
  require(std::isfinite(c.v_min) && c.v_min >= 0, "--vmin must be >= 0");
  require(std::isfinite(c.v_max) && c.v_max >= c.v_min, "--vmax must be >= --vmin");
  require(c.v_max < c.boat_speed, "--vmax must be below --boat-speed");
  require(std::isfinite(c.turn_penalty) && c.turn_penalty >= 0, "--turn-penalty must be >= 0");
  require(c.calibrate == 0 || c.calibrate >= 1, "--calibrate must be 0 (off) or a ratio >= 1");
  require(c.max_waypoints >= 2, "--max-waypoints must be >= 2");
}

std::optional<GeoReference> geo_of(const RunConfig& c) {
  if (c.geo.empty()) return std::nullopt;
  const Vec2 ll = parse_pair(c.geo, "--geo");
  require(std::abs(ll.x) <= 90 && std::abs(ll.y) <= 180, "--geo must be LAT,LON in degrees");
  return GeoReference{ll.x, ll.y};
}

RiverMap load_map(const RunConfig& c) {
  require(!c.map.empty(), "--map is required");
  return load_map_file(c.map, c.resolution, geo_of(c));
}

Vec2 start_of(const RunConfig& c) {
  require(!c.start.empty(), "--start X,Y is required");
  return parse_pair(c.start, "--start");
}

Algorithm algo_of(const std::string& name) {
  const auto a = parse_algorithm(name);
  require(a.has_value(), "unknown algorithm '" + name + "' (m-cover, width-m-cover, l-cover, t-cover, z-cover)");
  return *a;
}

std::filesystem::path out_dir(const RunConfig& c) {
  std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + c.out + "': " + ec.message());
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  try {
    write_text_file(p.string(), body);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

FieldParams field_params(const RunConfig& c) {
  FieldParams p;
  p.v_min = c.v_min;
  p.v_max = c.v_max;
  p.exponent = c.exponent;
  if (c.profile == "linear") p.profile = SpeedProfile::Linear;
  else if (c.profile == "power") p.profile = SpeedProfile::PowerLaw;
  else throw ValidationError("--profile must be linear or power");
  return p;
}

int cmd_plan(const RunConfig& c, std::ostream& out) {
  const RiverMap map = load_map(c);
  const CoveragePlan plan = plan_coverage(algo_of(c.algo), map, start_of(c), c.spacing);
  const auto dir = out_dir(c);
  ExportOptions opts;
  opts.max_waypoints = c.max_waypoints;
  write_file(dir / "plan.geojson", export_plan(plan, MissionFormat::GeoJson, std::nullopt, opts).body);
  out << plan_summary(map, plan);
  int passes = 0;
  for (const auto& leg : plan.legs) passes = std::max(passes, leg.lane_count);
  out << "passes: " << passes << "\n";
  out << "wrote: " << (dir / "plan.geojson").string() << "\n";
  if (map.geo()) {
    write_file(dir / "mission.waypoints", export_plan(plan, MissionFormat::QgcWpl110, map.geo(), opts).body);
    write_file(dir / "mission.gpx", export_plan(plan, MissionFormat::Gpx, map.geo(), opts).body);
    out << "wrote: " << (dir / "mission.waypoints").string() << "\nwrote: " << (dir / "mission.gpx").string() << "\n";
  } else {
    out << "note: no geo reference, WPL and GPX skipped (use --geo LAT,LON)\n";
  }
  return 0;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  const RiverMap map = load_map(c);
  const Vec2 start = start_of(c);
  std::vector<Algorithm> algos;
  std::stringstream names(c.algos);
  for (std::string name; std::getline(names, name, ',');)
    if (!name.empty()) algos.push_back(algo_of(name));
  require(!algos.empty(), "--algos needs at least one algorithm");

  const RiverModel model = build_river_model(map, start);
  FieldParams params = field_params(c);
  if (c.calibrate > 0) {
    params = calibrate_field(map, model, params, c.boat_speed, c.calibrate);
    out << "calibrated_vmax: " << fixed(params.v_max, 4) << "\n";
  }
  const CurrentField field = synth_current_field(map, model, params);
  std::vector<CoveragePlan> plans;
  for (Algorithm a : algos) plans.push_back(plan_coverage(a, map, start, c.spacing));
  const Comparison cmp = compare_plans(plans, field, {c.boat_speed, c.turn_penalty});
  const auto dir = out_dir(c);
  write_file(dir / "compare.csv", cmp.csv());
  out << cmp.csv() << cmp.verdict() << "\n";
  return 0;
}

int cmd_render(const RunConfig& c, std::ostream& out) {
  const RiverMap map = load_map(c);
  const Vec2 start = start_of(c);
  const CoveragePlan plan = plan_coverage(algo_of(c.algo), map, start, c.spacing);
  const auto dir = out_dir(c);
  write_file(dir / "plan.svg", render_svg(map, build_river_model(map, start), plan));
  out << "wrote: " << (dir / "plan.svg").string() << "\n";
  return 0;
}

std::vector<DepthSample> load_samples(const RunConfig& c, const RiverMap& map) {
  require(!c.samples.empty(), "--samples is required");
  std::ifstream in(c.samples);
  if (!in) throw IoError("cannot read samples '" + c.samples + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (c.samples.size() >= 4 && c.samples.substr(c.samples.size() - 4) == ".gpx") {
    require(map.geo().has_value(), "GPX depth samples need a geo reference (--geo LAT,LON)");
    return read_depth_gpx(ss.str(), *map.geo());
  }
  return read_depth_csv(ss.str());
}

int cmd_depthmap(const RunConfig& c, std::ostream& out) {
  require(c.folds >= 2, "--folds must be >= 2");
  const RiverMap map = load_map(c);
  const auto samples = load_samples(c, map);
  GpFitOptions opts;
  opts.seed = c.seed;
  const bool fixed_params = c.length_scale > 0 || c.signal_var > 0 || c.noise_var > 0;
  if (fixed_params) {
    require(c.length_scale > 0 && c.signal_var > 0 && c.noise_var > 0,
            "--length-scale, --signal-var and --noise-var must all be > 0 when any is given");
    opts.params = KernelParams{c.length_scale, c.signal_var, c.noise_var};
  }
  const DepthGp gp = fit_depth_gp(samples, opts, map.resolution());
  const DepthMap dm = predict_depth_map(map, gp);
  const double cv = kfold_rmse(samples, c.folds, opts, map.resolution());
  double lo = samples.front().depth, hi = lo;
  for (const auto& s : samples) lo = std::min(lo, s.depth), hi = std::max(hi, s.depth);

  const auto dir = out_dir(c);
  write_file(dir / "depth_mean.asc", to_esri_ascii(dm, DepthLayer::Mean));
  write_file(dir / "depth_std.asc", to_esri_ascii(dm, DepthLayer::StdDev));
  const KernelParams& k = gp.params();
  out << "samples_used: " << dm.samples_used << "\n"
      << "length_scale_m: " << fixed(k.length_scale, 3) << "\nsignal_var: " << fixed(k.signal_var, 5)
      << "\nnoise_var: " << fixed(k.noise_var, 6) << "\n"
      << "depth_range_m: " << fixed(hi - lo, 3) << "\n"
      << "rmse_kfold_m: " << fixed(cv, 4) << " (" << c.folds << " folds)\n"
      << "wrote: " << (dir / "depth_mean.asc").string() << "\nwrote: " << (dir / "depth_std.asc").string() << "\n";
  return 0;
}

synthetic::SyntheticRiver synth_river(const RunConfig& c) {
  require(c.length > 0 && c.width > 0, "--length and --width must be > 0");
  if (c.shape == "straight") return synthetic::straight(c.length, c.width);
  if (c.shape == "sine") {
    require(c.wavelength > 0, "--wavelength must be > 0");
    return synthetic::sine(c.length, c.amplitude, c.wavelength, c.width);
  }
  if (c.shape == "s-curve") {
    require(c.amplitude > c.width, "s-curve needs --amplitude (bend radius) > --width");
    return synthetic::s_curve(c.amplitude, M_PI / 2, c.length, c.width);
  }
  throw ValidationError("--shape must be straight, sine or s-curve");
}

int cmd_synth(const RunConfig& c, std::ostream& out) {
  const double res = c.resolution > 0 ? c.resolution : 2.0;
  const auto river = synth_river(c);
  RiverPolygon poly = river.polygon;
  poly.geo = geo_of(c);
  const auto dir = out_dir(c);
  write_file(dir / "river.geojson", polygon_to_geojson(poly, res));
  out << "shape: " << c.shape << "\nlength_m: " << fixed(river.length(), 1) << "\nstart: " << fixed(river.start().x, 3)
      << "," << fixed(river.start().y, 3) << "\nwrote: " << (dir / "river.geojson").string() << "\n";

  if (c.depth_samples > 0) {
    // Smooth bed, deepest mid-channel, plus 5 cm gauge noise, at random Free cells.
    const RiverMap map = rasterize_polygon(poly, res);
    std::vector<CellIndex> free;
    for (int j = 0; j < map.height(); ++j)
      for (int i = 0; i < map.width(); ++i)
        if (map.is_free(i, j)) free.push_back({i, j});
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::string csv = "x,y,depth\n";
    for (int n = 0; n < c.depth_samples; ++n) {
      const CellIndex cell = free[rng() % free.size()];
      Vec2 p = map.cell_center(cell.i, cell.j);
      p.x += jitter(rng) * res;
      p.y += jitter(rng) * res;
      const double d = 3.0 + 1.2 * std::sin(p.x / 180.0) * std::cos(p.y / 140.0) + 0.4 * std::sin(p.x / 47.0) + noise(rng);
      csv += fixed(p.x, 3) + "," + fixed(p.y, 3) + "," + fixed(std::max(d, 0.1), 3) + "\n";
    }
    write_file(dir / "depth.csv", csv);
    out << "wrote: " << (dir / "depth.csv").string() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Riverine coverage path planning"};
  app.name("rivercover");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file; keys are long option names");

  app.add_option("--map", c.map, "River map (.geojson polygon or .pgm raster)");
  app.add_option("--start", c.start, "Start point X,Y in map metres")->delimiter(',')->expected(2);
  app.add_option("--geo", c.geo, "Geo reference LAT,LON of the metric origin")->delimiter(',')->expected(2);
  app.add_option("--resolution", c.resolution, "Cell size in metres (0 keeps the map's own)");
  app.add_option("--spacing", c.spacing, "Lane spacing s in metres")->capture_default_str();
  app.add_option("--algo", c.algo, "m-cover, width-m-cover, l-cover, t-cover or z-cover")->capture_default_str();
  app.add_option("--algos", c.algos, "Comma-separated algorithms to compare")->capture_default_str();
  app.add_option("--vmin", c.v_min, "Current at the inner bank, m/s")->capture_default_str();
  app.add_option("--vmax", c.v_max, "Current at the outer bank, m/s")->capture_default_str();
  app.add_option("--profile", c.profile, "Cross-river profile: linear or power")->capture_default_str();
  app.add_option("--exponent", c.exponent, "Power-law exponent")->capture_default_str();
  app.add_option("--boat-speed", c.boat_speed, "Speed through water, m/s")->capture_default_str();
  app.add_option("--turn-penalty", c.turn_penalty, "Seconds per radian of heading change")->capture_default_str();
  app.add_option("--calibrate", c.calibrate, "Fit --vmax to this outer-lane up:down time ratio (0 = off)");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for randomised restarts and synthetic samples")->capture_default_str();
  app.add_option("--max-waypoints", c.max_waypoints, "Waypoint budget for mission files")->capture_default_str();
  app.add_option("--samples", c.samples, "Depth samples (.csv x,y,depth or .gpx)");
  app.add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--length-scale", c.length_scale, "Fixed GP length scale (m)");
  app.add_option("--signal-var", c.signal_var, "Fixed GP signal variance");
  app.add_option("--noise-var", c.noise_var, "Fixed GP noise variance");
  app.add_option("--shape", c.shape, "Synthetic river: straight, sine or s-curve")->capture_default_str();
  app.add_option("--length", c.length, "Synthetic river length (m)")->capture_default_str();
  app.add_option("--width", c.width, "Synthetic river width (m)")->capture_default_str();
  app.add_option("--amplitude", c.amplitude, "Sine amplitude or s-curve radius (m)")->capture_default_str();
  app.add_option("--wavelength", c.wavelength, "Sine wavelength (m)")->capture_default_str();
  app.add_option("--depth-samples", c.depth_samples, "Synthetic depth soundings to write")->capture_default_str();

  for (const char* name : {"plan", "compare", "render", "depthmap", "synth"}) app.add_subcommand(name);
  app.get_subcommand("plan")->description("Plan coverage and write mission files");
  app.get_subcommand("compare")->description("Time several planners in a synthetic current");
  app.get_subcommand("render")->description("Draw the plan as SVG");
  app.get_subcommand("depthmap")->description("Fit a GP depth map to soundings");
  app.get_subcommand("synth")->description("Write a synthetic river fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();

  try {
    check_common(c);
    if (c.subcommand == "plan") return cmd_plan(c, out);
    if (c.subcommand == "compare") return cmd_compare(c, out);
    if (c.subcommand == "render") return cmd_render(c, out);
    if (c.subcommand == "depthmap") return cmd_depthmap(c, out);
    return cmd_synth(c, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rivercover
