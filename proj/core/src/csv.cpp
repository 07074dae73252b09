#include "satprec/csv.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace satprec::csv {
namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_steps(const std::filesystem::path& path, const std::vector<env::StepRow>& rows) {
  auto out = open(path);
  out << "episode,step,t_seconds,r_con,r_quant,sum_rate,serving_sat,handover_flag\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", r.episode, r.step, r.t,
               r.r_con, r.r_quant, r.sum_rate, r.serving.str(), r.handover ? 1 : 0);
  }
}

void write_episodes(const std::filesystem::path& path,
                    const std::vector<agent::EpisodeRow>& rows) {
  auto out = open(path);
  out << "episode,mean_reward,mean_sum_rate,actor_loss_proxy,critic_loss,noise_var,handovers\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.episode, r.mean_reward,
               r.mean_sum_rate, r.actor_loss_proxy, r.critic_loss, r.noise_var, r.handovers);
  }
}

void write_handovers(const std::filesystem::path& path, const orbits::HandoverTrace& trace) {
  auto out = open(path);
  out << "t,serving_id,distance_m,elevation_rad,handover_flag\n";
  for (const auto& p : trace.points) {
    fmt::print(out, "{:.17g},{},{:.17g},{:.17g},{}\n", p.t, p.serving.str(), p.distance,
               p.elevation, p.handover ? 1 : 0);
  }
}

void write_channels(const std::filesystem::path& path,
                    const std::vector<baselines::TraceStep>& trace) {
  auto out = open(path);
  const Eigen::Index m = trace.empty() ? 0 : trace.front().now.rows();
  out << "t,user";
  for (Eigen::Index i = 0; i < m; ++i) out << ",re_" << i << ",im_" << i;
  out << '\n';
  for (const auto& step : trace) {
    for (Eigen::Index k = 0; k < step.now.cols(); ++k) {
      fmt::print(out, "{:.17g},{}", step.t, k);
      for (Eigen::Index i = 0; i < m; ++i) {
        fmt::print(out, ",{:.17g},{:.17g}", step.now(i, k).real(), step.now(i, k).imag());
      }
      out << '\n';
    }
  }
}

}  // namespace satprec::csv
