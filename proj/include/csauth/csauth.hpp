// SPDX-License-Identifier: Apache-2.0
//
// csauth - concurrent encryption and authentication over wireless links
// using compressed-sensing measurement-matrix keys.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef CSAUTH_CSAUTH_HPP
#define CSAUTH_CSAUTH_HPP

#include "csauth/cs_core.hpp"
#include "csauth/experiments.hpp"
#include "csauth/io.hpp"
#include "csauth/key_schedule.hpp"
#include "csauth/phy_channel.hpp"
#include "csauth/rng.hpp"
#include "csauth/stats.hpp"
#include "csauth/tagcrypt.hpp"

#endif  // CSAUTH_CSAUTH_HPP
