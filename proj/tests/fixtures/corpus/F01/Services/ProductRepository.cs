using System.Collections.Generic;
using System.Data.SqlClient;
using Storefront.Models;

namespace Storefront.Services;

public sealed class ProductRepository
{
    public IReadOnlyList<Product> Search(string term)
    {
        var results = new List<Product>();
        using var conn = new SqlConnection(AppSettings.ConnectionString);
        conn.Open();
        var sql = "SELECT Id, Name, Category, Price, Stock FROM Products WHERE Name LIKE '%" + term + "%'";
        using var cmd = new SqlCommand(sql, conn);
        using var reader = cmd.ExecuteReader();
        while (reader.Read())
        {
            results.Add(new Product
            {
                Id = reader.GetInt32(0),
                Name = reader.GetString(1),
                Category = reader.GetString(2),
                Price = reader.GetDecimal(3),
                Stock = reader.GetInt32(4),
            });
        }
        return results;
    }

    public Product? Find(int id)
    {
        using var conn = new SqlConnection(AppSettings.ConnectionString);
        conn.Open();
        using var cmd = new SqlCommand("SELECT Id, Name, Category, Price, Stock FROM Products WHERE Id = @id", conn);
        cmd.Parameters.AddWithValue("@id", id);
        using var reader = cmd.ExecuteReader();
        if (!reader.Read()) return null;
        return new Product
        {
            Id = reader.GetInt32(0),
            Name = reader.GetString(1),
            Category = reader.GetString(2),
            Price = reader.GetDecimal(3),
            Stock = reader.GetInt32(4),
        };
    }
}
