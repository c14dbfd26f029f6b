#pragma once

#include "waggle/classifier.hpp"
#include "waggle/error.hpp"
#include "waggle/evaluation.hpp"
#include "waggle/features.hpp"
#include "waggle/io.hpp"
#include "waggle/logistic.hpp"
#include "waggle/mlp.hpp"
#include "waggle/monitor.hpp"
#include "waggle/replay.hpp"
#include "waggle/signal.hpp"
#include "waggle/svm.hpp"
#include "waggle/synth.hpp"
#include "waggle/training.hpp"
