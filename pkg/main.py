#!/usr/bin/env python3
"""
Quantum Perceptron Workbench
Derivative-free training of quantum-inspired perceptron networks, with a
backpropagation baseline, a unitary Markov chain sampler and neuron dynamics
"""

import sys

from src.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
