// SPDX-License-Identifier: Apache-2.0
//
// Straight-line serial versions of the parallel kernels. They share no code
// with the optimized paths beyond the domain types and are used as oracles in
// tests and as the baseline in benchmarks.
#pragma once

#include <span>

#include "usmb/beamform.hpp"
#include "usmb/simulator.hpp"
#include "usmb/tof.hpp"

namespace usmb::reference {

/// Every sample evaluates every scatterer; no pulse-support truncation.
RfDataCube simulate(const TransducerArray& array, std::span<const TransmitEvent> events,
                    const ScattererField& field, const sim::PulseModel& pulse,
                    const sim::SimulationParams& params);

tof::DelayTensor compute_delays(const TransducerArray& array,
                                std::span<const TransmitEvent> events, const ImagingGrid& grid,
                                double speed);

/// Analytic signal from a direct O(N^2) DFT.
std::vector<cplx> analytic_signal(std::span<const double> x);

FocusedTensor focus(const RfDataCube& cube, const tof::DelayTensor& delays,
                    const ImagingGrid& grid, const tof::FocusOptions& options = {});

BeamformedImage das(const FocusedTensor& focused, const ApodizationWindow& apod);

/// Covariance summed subaperture by subaperture, no recurrence.
numerics::CMatrix estimate_covariance(std::span<const std::span<const cplx>> neighborhood,
                                      const bf::CovarianceConfig& cfg);

BeamformedImage mv(const FocusedTensor& focused, const bf::CovarianceConfig& cfg,
                   bf::CovarianceModel model = bf::CovarianceModel::Sample);

RealImage coherence_factor(const FocusedTensor& focused);

BeamformedImage imap(const FocusedTensor& focused, int iterations);

}  // namespace usmb::reference
