// Copyright 2026 The ccnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CCNET_CCNET_HPP
#define CCNET_CCNET_HPP

#include "ccnet/adadelta.hpp"
#include "ccnet/chars.hpp"
#include "ccnet/corpus_io.hpp"
#include "ccnet/corrnet.hpp"
#include "ccnet/error.hpp"
#include "ccnet/gradcheck.hpp"
#include "ccnet/lingprops.hpp"
#include "ccnet/model.hpp"
#include "ccnet/neighborhood.hpp"
#include "ccnet/numerics.hpp"
#include "ccnet/qvec.hpp"
#include "ccnet/random.hpp"
#include "ccnet/stats.hpp"
#include "ccnet/synth.hpp"
#include "ccnet/trainer.hpp"

#endif  // CCNET_CCNET_HPP
