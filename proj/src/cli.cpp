#include "geosp/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "geosp/connectivity.hpp"
#include "geosp/mesh_io.hpp"
#include "geosp/parallel.hpp"
#include "geosp/parcellator.hpp"
#include "geosp/synthetic.hpp"
#include "text_util.hpp"

namespace geosp {

Parcellation parcellation_from_ids(const VertexLabels& ids) {
  std::map<Label, std::size_t> renumber;
  for (auto id : distinct_labels(ids)) {
    const auto next = renumber.size();
    renumber.emplace(id, next);
  }
  Parcellation parcellation;
  parcellation.sub_parcel.reserve(ids.size());
  for (auto id : ids.labels) parcellation.sub_parcel.push_back(renumber.at(id));
  for (const auto& [id, global] : renumber) {
    parcellation.origin.push_back({id, 0});
  }
  return parcellation;
}

namespace {

namespace fs = std::filesystem;

struct ClusterOptions {
  std::uint64_t seed = 0;
  std::size_t workers = default_worker_count();
  double tolerance_mm = 2.0;
  std::size_t max_iterations = 20;
  fs::path out_dir;
  bool no_timings = false;
};

void add_cluster_options(CLI::App* cmd, ClusterOptions& options) {
  cmd->add_option("--seed", options.seed, "Random seed")->capture_default_str();
  cmd->add_option("--workers", options.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tolerance", options.tolerance_mm,
                  "Convergence tolerance on centroid displacement (mm)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iterations", options.max_iterations,
                  "Iteration cap per K-means run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", options.out_dir, "Output directory")->required();
  cmd->add_flag("--no-timings", options.no_timings,
                "Leave wall-clock times out of summary.txt");
}

KmeansConfig make_config(const ClusterOptions& options, std::size_t k) {
  KmeansConfig config;
  config.k = k;
  config.rng_seed = options.seed;
  config.workers = options.workers;
  config.convergence_tolerance_mm = options.tolerance_mm;
  config.max_iterations = options.max_iterations;
  return config;
}

void write_outputs(const ClusterOptions& options, const TriangleMesh& mesh,
                   const ParcellationRun& run, std::ostream& out) {
  write_parcellation(options.out_dir, run.parcellation, mesh);
  detail::write_file(options.out_dir / "summary.txt",
                     summarize(run, !options.no_timings));
  out << fmt::format("{} sub-parcels written to {}\n",
                     run.parcellation.parcel_count(), options.out_dir.string());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Geodesic surface parcellation and connectivity analysis",
               "geosp"};
  app.require_subcommand(1);

  // parcellate-atlas
  auto* atlas = app.add_subcommand(
      "parcellate-atlas", "Split every labeled region into k sub-parcels");
  fs::path atlas_mesh, atlas_labels, atlas_plan;
  std::optional<std::size_t> atlas_k;
  ClusterOptions atlas_options;
  atlas->add_option("--mesh", atlas_mesh, "Mesh (.off or .ply)")
      ->required()
      ->check(CLI::ExistingFile);
  atlas->add_option("--labels", atlas_labels, "Per-vertex region labels")
      ->required()
      ->check(CLI::ExistingFile);
  auto* k_opt = atlas->add_option("--k", atlas_k, "Sub-parcels per region")
                    ->check(CLI::PositiveNumber);
  auto* plan_opt =
      atlas->add_option("--plan", atlas_plan, "Plan file of 'region_id k' lines")
          ->check(CLI::ExistingFile);
  k_opt->excludes(plan_opt);
  add_cluster_options(atlas, atlas_options);

  // parcellate-whole
  auto* whole = app.add_subcommand(
      "parcellate-whole", "Split each hemisphere into k sub-parcels");
  std::vector<fs::path> whole_meshes;
  fs::path whole_hemis;
  std::size_t whole_k = 1;
  ClusterOptions whole_options;
  whole->add_option("--mesh", whole_meshes,
                    "One mesh, or two meshes (one per hemisphere)")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingFile);
  auto* hemis_opt = whole->add_option("--hemis", whole_hemis,
                                      "Per-vertex hemisphere labels (two values)")
                        ->check(CLI::ExistingFile);
  whole->add_option("--k", whole_k, "Sub-parcels per hemisphere")
      ->required()
      ->check(CLI::PositiveNumber);
  add_cluster_options(whole, whole_options);

  // connectivity
  auto* conn = app.add_subcommand(
      "connectivity", "Count fibers between sub-parcels");
  fs::path conn_mesh, conn_parcellation, conn_fibers, conn_out, conn_binary;
  conn->add_option("--mesh", conn_mesh, "Mesh (.off or .ply)")
      ->required()
      ->check(CLI::ExistingFile);
  conn->add_option("--parcellation", conn_parcellation,
                   "Per-vertex sub-parcel ids")
      ->required()
      ->check(CLI::ExistingFile);
  conn->add_option("--fibers", conn_fibers, "Fiber endpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  conn->add_option("--out", conn_out, "Count matrix output")->required();
  conn->add_option("--binary-out", conn_binary, "Binarized matrix output");

  // dice
  auto* dice = app.add_subcommand(
      "dice", "Pairwise Dice reproducibility of connectivity matrices");
  std::vector<fs::path> dice_inputs;
  fs::path dice_out;
  bool exclude_diagonal = false;
  std::size_t dice_workers = default_worker_count();
  dice->add_option("matrices", dice_inputs, "Two or more matrix files")
      ->required()
      ->check(CLI::ExistingFile);
  dice->add_flag("--exclude-diagonal", exclude_diagonal,
                 "Ignore self-connections");
  dice->add_option("--out", dice_out, "Report file (default: stdout)");
  dice->add_option("--workers", dice_workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic test dataset");
  MeshSpec spec;
  std::string kind_name = "grid";
  std::size_t fiber_count = 0;
  bool fiber_points = false;
  fs::path synth_out;
  synth->add_option("--kind", kind_name,
                    "grid | icosphere | wave_sheet | dumbbell | "
                    "two_hemispheres | atlas")
      ->capture_default_str();
  synth->add_option("--nx", spec.nx)->capture_default_str();
  synth->add_option("--ny", spec.ny)->capture_default_str();
  synth->add_option("--spacing", spec.spacing_mm)->capture_default_str();
  synth->add_option("--level", spec.subdivision, "Icosphere subdivision level")
      ->capture_default_str();
  synth->add_option("--radius", spec.radius_mm)->capture_default_str();
  synth->add_option("--amplitude", spec.amplitude_mm)->capture_default_str();
  synth->add_option("--wavelength", spec.wavelength_mm)->capture_default_str();
  synth->add_option("--gap", spec.gap_mm)->capture_default_str();
  synth->add_option("--regions-x", spec.regions_x)->capture_default_str();
  synth->add_option("--regions-y", spec.regions_y)->capture_default_str();
  synth->add_option("--jitter", spec.jitter_mm)->capture_default_str();
  synth->add_option("--seed", spec.rng_seed)->capture_default_str();
  synth->add_option("--fibers", fiber_count, "Random fibers to write");
  synth->add_flag("--fiber-points", fiber_points,
                  "Write fiber endpoints as points instead of vertex indices");
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("geosp");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*atlas) {
      if (!atlas_k && atlas_plan.empty()) {
        err << "error: parcellate-atlas needs --k or --plan\n"
            << atlas->help();
        return 2;
      }
      const auto mesh = load_mesh(atlas_mesh);
      const auto labels = load_labels(atlas_labels, mesh.vertex_count());
      const auto plan = atlas_k ? AtlasPlan::uniform(labels, *atlas_k)
                                : load_plan(atlas_plan);
      const auto run = parcellate_atlas_mode(mesh, labels, plan,
                                             make_config(atlas_options, 1));
      write_outputs(atlas_options, mesh, run, out);
    } else if (*whole) {
      CombinedMesh input;
      if (whole_meshes.size() == 2) {
        if (*hemis_opt) {
          err << "error: --hemis cannot be combined with two meshes\n";
          return 2;
        }
        input = combine_meshes({load_mesh(whole_meshes[0]),
                                load_mesh(whole_meshes[1])});
      } else {
        input.mesh = load_mesh(whole_meshes[0]);
        input.labels = *hemis_opt
                           ? load_labels(whole_hemis, input.mesh.vertex_count())
                           : VertexLabels{std::vector<Label>(
                                 input.mesh.vertex_count(), 0)};
      }
      const auto run = parcellate_whole_mode(input.mesh, input.labels,
                                             make_config(whole_options, whole_k));
      write_outputs(whole_options, input.mesh, run, out);
    } else if (*conn) {
      const auto mesh = load_mesh(conn_mesh);
      const auto parcellation = parcellation_from_ids(
          load_labels(conn_parcellation, mesh.vertex_count()));
      const auto fibers = load_fibers(conn_fibers);
      const auto counts = build_connectivity_matrix(fibers, parcellation, mesh);
      write_matrix(conn_out, counts);
      if (!conn_binary.empty()) write_matrix(conn_binary, binarize(counts));
      out << fmt::format("{} fibers over {} sub-parcels written to {}\n",
                         fibers.size(), parcellation.parcel_count(),
                         conn_out.string());
    } else if (*dice) {
      std::vector<BinaryConnectivity> matrices;
      for (const auto& path : dice_inputs) {
        matrices.push_back(binarize(load_matrix(path)));
      }
      const auto summary =
          pairwise_dice(matrices, !exclude_diagonal, dice_workers);
      const auto report = format_dice_report(summary);
      if (dice_out.empty()) {
        out << report;
      } else {
        detail::write_file(dice_out, report);
      }
    } else if (*synth) {
      const auto kind = parse_mesh_kind(kind_name);
      if (!kind) {
        err << "error: unknown mesh kind '" << kind_name << "'\n";
        return 2;
      }
      spec.kind = *kind;
      const auto data = make_mesh(spec);
      fs::create_directories(synth_out);
      write_mesh(synth_out / "mesh.off", data.mesh, MeshFormat::off);
      if (data.regions) write_labels(synth_out / "labels.txt", *data.regions);
      if (data.hemispheres) {
        write_labels(synth_out / "hemispheres.txt", *data.hemispheres);
      }
      if (fiber_count > 0) {
        write_fibers(synth_out / "fibers.txt",
                     random_fibers(data.mesh, fiber_count, spec.rng_seed,
                                   fiber_points));
      }
      out << fmt::format("{} vertices, {} triangles written to {}\n",
                         data.mesh.vertex_count(), data.mesh.triangles.size(),
                         synth_out.string());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace geosp
