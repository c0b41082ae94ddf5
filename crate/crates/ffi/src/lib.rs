// placeholder until the core API is final
