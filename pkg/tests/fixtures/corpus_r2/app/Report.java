package app;

import lib.Util;
import lib.Sink;

public class Report {
    Util util;

    public void emit(Sink target) {
        Util u = new Util(7);
        target.write(u.trim("x"));
    }

    public void close(Sink target) {
        target.flush();
    }
}
