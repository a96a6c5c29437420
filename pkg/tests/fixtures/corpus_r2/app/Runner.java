package app;

public interface Runner {
    void run();
}
