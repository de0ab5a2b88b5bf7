// Command-line front end: grasp-database generation, simulation runs,
// ablation sweeps, and report extraction.

#include "binpick/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace binpick;

SymmetryGroup symmetry_by_name(const std::string& name, const Vec3& extents) {
  if (name == "trivial" || name.empty()) return SymmetryGroup::trivial();
  if (name == "cylinder") return SymmetryGroup::cylinder_z();
  if (name == "box") return SymmetryGroup::box(extents);
  if (name == "cube") return SymmetryGroup::cube();
  throw CLI::ValidationError("symmetry", "unknown symmetry group: " + name);
}

int cmd_gen_grasps(const std::string& mesh_path, const std::string& gripper_path,
                   const std::string& config_path, const std::string& out_path) {
  GraspGenConfig gen;
  std::string symmetry = "trivial";
  int class_id = 1;
  if (!config_path.empty()) {
    const TomlDoc doc = TomlDoc::parse_file(config_path);
    const double deg = M_PI / 180.0;
    gen.target_pairs = int(doc.get_int("grasp_gen.target_pairs", gen.target_pairs));
    gen.antipodal_tolerance =
        doc.get_double("grasp_gen.antipodal_tolerance_deg", gen.antipodal_tolerance / deg) * deg;
    gen.approach_samples = int(doc.get_int("grasp_gen.approach_samples", gen.approach_samples));
    gen.seed = uint64_t(doc.get_int("grasp_gen.seed", int64_t(gen.seed)));
    gen.budget_factor = int(doc.get_int("grasp_gen.budget_factor", gen.budget_factor));
    gen.finger_clearance = doc.get_double("grasp_gen.finger_clearance", gen.finger_clearance);
    symmetry = doc.get_string("object.symmetry", symmetry);
    class_id = int(doc.get_int("object.class_id", class_id));
  }

  TriangleMesh mesh = load_mesh(mesh_path);
  const Aabb box = mesh.aabb();
  ObjectModel object(class_id, mesh_path, std::move(mesh),
                     symmetry_by_name(symmetry, box.extents()));
  const GripperModel gripper =
      gripper_path.empty() ? GripperModel() : GripperModel::from_json_file(gripper_path);

  const GraspDatabase db = generate_grasp_db(object, gripper, gen);
  write_db(db, out_path);
  std::cout << "wrote " << db.candidates.size() << " candidates to " << out_path
            << (db.budget_exhausted ? " (sample budget exhausted)" : "") << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, int64_t seed_override,
                 const std::string& out_dir) {
  RunConfig config =
      config_path.empty() ? RunConfig{} : RunConfig::from_toml_file(config_path);
  if (seed_override >= 0) config.seed = uint64_t(seed_override);
  const RunResult result = run_simulation(config, out_dir);
  const RunMetrics& m = result.metrics;
  std::cout << "iterations " << m.iterations << "  attempts " << m.attempts << "  successes "
            << m.successes << "  early_exits " << m.early_exits << "\n";
  std::cout << "elapsed " << m.elapsed << " s  MPPH " << m.mpph() << "  SR ";
  if (auto sr = m.sr())
    std::cout << *sr;
  else
    std::cout << "null";
  std::cout << "  EER " << m.eer() << "\n";
  return 0;
}

int cmd_ablate(const std::string& axis, const std::string& config_path, int64_t seed_override,
               const std::string& out_dir) {
  RunConfig base = config_path.empty() ? RunConfig{} : RunConfig::from_toml_file(config_path);
  if (seed_override >= 0) base.seed = uint64_t(seed_override);

  struct Arm {
    std::string name;
    RunConfig config;
  };
  std::vector<Arm> arms;
  if (axis == "memory") {
    Arm with{"with_memory", base}, without{"no_memory", base};
    with.config.memory = true;
    without.config.memory = false;
    arms = {with, without};
  } else if (axis == "depth") {
    Arm enhanced{"enhanced", base}, raw{"raw", base};
    enhanced.config.depth_preset = "enhanced";
    raw.config.depth_preset = "raw";
    arms = {enhanced, raw};
  } else {
    throw CLI::ValidationError("--axis", "must be memory or depth");
  }

  std::cout << "arm,iterations,attempts,successes,early_exits,elapsed_s,mpph,sr,eer\n";
  for (const auto& arm : arms) {
    const std::string arm_dir = out_dir.empty() ? "" : out_dir + "/" + arm.name;
    const RunMetrics m = run_simulation(arm.config, arm_dir).metrics;
    std::cout << arm.name << "," << m.iterations << "," << m.attempts << "," << m.successes << ","
              << m.early_exits << "," << m.elapsed << "," << m.mpph() << ",";
    if (auto sr = m.sr())
      std::cout << *sr;
    else
      std::cout << "null";
    std::cout << "," << m.eer() << "\n";
  }
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
  std::ifstream events(in_dir + "/events.jsonl");
  if (!events) throw std::runtime_error("cannot open " + in_dir + "/events.jsonl");

  int iterations = 0, attempts = 0, successes = 0, early_exits = 0;
  double elapsed = 0.0;
  std::string line;
  std::vector<nlohmann::ordered_json> rows;
  while (std::getline(events, line)) {
    if (line.empty()) continue;
    const auto ev = nlohmann::ordered_json::parse(line);
    ++iterations;
    elapsed = ev.value("time", elapsed);
    if (ev.contains("early_exit")) ++early_exits;
    if (ev.contains("attempt")) {
      ++attempts;
      if (ev["attempt"].value("result", "") == std::string("success")) ++successes;
    }
    rows.push_back(ev);
  }

  const double mpph = elapsed > 0 ? successes * 3600.0 / elapsed : 0.0;
  const double eer = iterations > 0 ? double(early_exits) / iterations : 0.0;
  if (format == "json") {
    nlohmann::ordered_json out;
    out["iterations"] = iterations;
    out["attempts"] = attempts;
    out["successes"] = successes;
    out["early_exits"] = early_exits;
    out["elapsed_s"] = elapsed;
    out["mpph"] = mpph;
    if (attempts > 0)
      out["sr"] = double(successes) / attempts;
    else
      out["sr"] = nullptr;
    out["eer"] = eer;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "iterations,attempts,successes,early_exits,elapsed_s,mpph,sr,eer\n";
    std::cout << iterations << "," << attempts << "," << successes << "," << early_exits << ","
              << elapsed << "," << mpph << ",";
    if (attempts > 0)
      std::cout << double(successes) / attempts;
    else
      std::cout << "null";
    std::cout << "," << eer << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bin-picking planning and evaluation toolkit"};
  app.require_subcommand(1);

  // gen-grasps
  std::string mesh_path, gripper_path, gen_config, gen_out = "grasps.json";
  auto* gen = app.add_subcommand("gen-grasps", "Generate a grasp database for a mesh");
  gen->add_option("--mesh", mesh_path, "Object mesh (STL or OBJ)")->required();
  gen->add_option("--gripper", gripper_path, "Gripper parameter JSON");
  gen->add_option("--config", gen_config, "TOML config (grasp_gen / object sections)");
  gen->add_option("--out", gen_out, "Output database path");

  // simulate
  std::string sim_config, sim_out;
  int64_t sim_seed = -1;
  auto* sim = app.add_subcommand("simulate", "Run the full picking simulation");
  sim->add_option("--config", sim_config, "Run configuration (TOML)");
  sim->add_option("--seed", sim_seed, "Seed override");
  sim->add_option("--out", sim_out, "Output directory (events.jsonl, metrics.csv)");

  // ablate
  std::string axis, abl_config, abl_out;
  int64_t abl_seed = -1;
  auto* abl = app.add_subcommand("ablate", "Run a two-arm ablation");
  abl->add_option("--axis", axis, "Ablation axis: memory | depth")->required();
  abl->add_option("--config", abl_config, "Run configuration (TOML)");
  abl->add_option("--seed", abl_seed, "Seed override");
  abl->add_option("--out", abl_out, "Output directory root");

  // report
  std::string rep_in, rep_format = "csv";
  auto* rep = app.add_subcommand("report", "Summarize a finished run directory");
  rep->add_option("--in", rep_in, "Run directory containing events.jsonl")->required();
  rep->add_option("--format", rep_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_grasps(mesh_path, gripper_path, gen_config, gen_out);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_seed, sim_out);
    if (abl->parsed()) return cmd_ablate(axis, abl_config, abl_seed, abl_out);
    if (rep->parsed()) return cmd_report(rep_in, rep_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
