#ifndef SCRIBLE_SCRIBLE_HPP
#define SCRIBLE_SCRIBLE_HPP

#include "scrible/adversary.hpp"
#include "scrible/barrier.hpp"
#include "scrible/error.hpp"
#include "scrible/ftrl.hpp"
#include "scrible/geometry.hpp"
#include "scrible/learner.hpp"
#include "scrible/loss.hpp"
#include "scrible/random.hpp"
#include "scrible/regret.hpp"

#endif  // SCRIBLE_SCRIBLE_HPP
