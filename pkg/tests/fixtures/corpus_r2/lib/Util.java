package lib;

public class Util {
    int width;

    public Util(int width) {
        this.width = width;
    }

    public String format(int value) {
        return Text.pad(value, width);
    }

    public String trim(String raw) {
        return raw;
    }
}

class Text {
    static String pad(int value, int width) {
        return "" + value + width;
    }
}
