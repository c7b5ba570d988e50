# Logger adapters package
