/*
 * Copyright 2026 The cotrainlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COTRAIN_CORE_LOG_HPP_
#define COTRAIN_CORE_LOG_HPP_

#include <memory>

#include <spdlog/logger.h>

namespace cotrain {

// Library-wide logger writing to stderr. The level is read once from the
// COTRAIN_LOG environment variable (error | info | debug, default info).
spdlog::logger& logger();

}  // namespace cotrain

#endif  // COTRAIN_CORE_LOG_HPP_
