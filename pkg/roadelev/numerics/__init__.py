# coding=utf-8
# Copyright (c) 2022, roadelev developers.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from .kernels import channel_pool, conv2d, conv3d, relu, sigmoid, softmax
from .parallel import chunk_ranges, get_num_threads, parallel_for, set_num_threads
from .tensor import DenseTensor, as_tensor, check_finite, check_rank, check_shape
from .tensor_io import load_tensor, save_tensor, tensor_exists, write_pgm
