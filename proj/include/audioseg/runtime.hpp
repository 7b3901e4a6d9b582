/* Copyright 2026 The audioseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

namespace audioseg {

// Keeps large freed blocks inside the process heap instead of returning
// them to the OS. Training allocates and frees multi-megabyte buffers for
// every sample; without this each one costs fresh page faults.
// Safe to call more than once; a no-op outside glibc.
void configure_allocator();

}  // namespace audioseg
