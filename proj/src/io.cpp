#include "stefanopt/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stefanopt {

std::string fmt17(double v) {
  // to_chars keeps the '.' decimal point regardless of the process locale.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void write_stamp(std::ofstream& out) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  out << "# generated " << buf << "\n";
}

}  // namespace

void write_state_csv(const std::string& path, const DiscreteStateVector& dsv) {
  auto out = open_out(path);
  write_stamp(out);
  out << "k,t_k,node_index,x,u\n";
  for (int k = 0; k <= dsv.n(); ++k) {
    const StateSlice& slice = dsv.slices[k];
    for (std::size_t i = 0; i < slice.nodal.size(); ++i) {
      out << k << ',' << fmt17(k * dsv.tau) << ',' << i << ',' << fmt17(slice.mesh.nodes[i])
          << ',' << fmt17(slice.nodal[i]) << '\n';
    }
  }
}

void write_control_csv(const std::string& path, const DiscreteControl& dc) {
  auto out = open_out(path);
  write_stamp(out);
  out << "k,t_k,s_k,g_k\n";
  for (int k = 0; k <= dc.n(); ++k)
    out << k << ',' << fmt17(dc.knot(k)) << ',' << fmt17(dc.s_vals[k]) << ','
        << fmt17(dc.g_vals[k]) << '\n';
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
  auto out = open_out(path);
  write_stamp(out);
  out << "iter,cost,penalty,step\n";
  for (const HistoryRow& row : history)
    out << row.iter << ',' << fmt17(row.cost) << ',' << fmt17(row.penalty) << ','
        << fmt17(row.step) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepTable& table) {
  auto out = open_out(path);
  write_stamp(out);
  out << "n,m,cost,energy_ratio,trace_error_flux,trace_error_phase,lift_sup_error\n";
  for (const SweepRow& row : table.rows)
    out << row.n << ',' << row.m << ',' << fmt17(row.cost) << ',' << fmt17(row.energy_ratio)
        << ',' << fmt17(row.trace_error_flux) << ',' << fmt17(row.trace_error_phase) << ','
        << fmt17(row.lift_sup_error) << '\n';
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::ordered_json cost_to_json(const CostBreakdown& cb) {
  return {{"total", cb.total}, {"flux_term", cb.flux_term}, {"phase_term", cb.phase_term}};
}

nlohmann::ordered_json energy_to_json(const EnergyReport& er) {
  return {{"lhs_first", er.lhs_first},
          {"lhs_second_extra", er.lhs_second_extra},
          {"rhs_data", er.rhs_data},
          {"rhs_boundary_overlap", er.rhs_boundary_overlap},
          {"ratio", er.ratio},
          {"ratio_defined", er.ratio_defined}};
}

nlohmann::ordered_json result_to_json(const OptResult& res) {
  nlohmann::ordered_json j;
  j["best"] = {{"n", res.best.n()},
               {"T", res.best.T},
               {"s_vals", res.best.s_vals},
               {"g_vals", res.best.g_vals}};
  j["best_cost"] = res.best_cost;
  j["converged"] = res.converged;
  j["iters"] = res.iters;
  return j;
}

}  // namespace stefanopt
