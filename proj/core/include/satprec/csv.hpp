#pragma once

#include <filesystem>
#include <vector>

#include "satprec/agent.hpp"
#include "satprec/baselines.hpp"
#include "satprec/env.hpp"
#include "satprec/orbits.hpp"

namespace satprec::csv {

// episode,step,t_seconds,r_con,r_quant,sum_rate,serving_sat,handover_flag
void write_steps(const std::filesystem::path& path, const std::vector<env::StepRow>& rows);

// episode,mean_reward,mean_sum_rate,actor_loss_proxy,critic_loss,noise_var,handovers
void write_episodes(const std::filesystem::path& path,
                    const std::vector<agent::EpisodeRow>& rows);

// t,serving_id,distance_m,elevation_rad,handover_flag
void write_handovers(const std::filesystem::path& path, const orbits::HandoverTrace& trace);

// t,user,re_0,im_0,...,re_{M-1},im_{M-1}; one row per user and instant.
void write_channels(const std::filesystem::path& path,
                    const std::vector<baselines::TraceStep>& trace);

}  // namespace satprec::csv
